//! Triangulated polar-grid meshes of lifted surfaces, with OBJ and binary
//! little-endian PLY export.
//!
//! The grid is a center vertex plus `nr` rings of `ntheta` vertices each
//! (so nr·ntheta + 1 in total), triangulated as a fan around the center and
//! consistently split quads between rings. Vertex normals are the analytic
//! surface normals, not face averages. Vertices are independent and evaluated
//! in parallel.

use num_complex::Complex64;
use rayon::prelude::*;
use std::io;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::harmonic::HarmonicMap;
use crate::lift;

#[derive(Debug, Clone, Copy)]
pub struct MeshVertex {
    pub position: Vec3,
    pub normal: Vec3,
    /// Disk parameter the vertex lifts.
    pub source: Complex64,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<MeshVertex>,
    /// Counter-clockwise triangles indexing into `vertices`.
    faces: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn vertices(&self) -> &[MeshVertex] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Wavefront OBJ: positions, normals, and faces referencing both.
    pub fn write_obj(&self, out: &mut dyn io::Write) -> io::Result<()> {
        for v in &self.vertices {
            writeln!(
                out,
                "v {:.9e} {:.9e} {:.9e}",
                v.position[0], v.position[1], v.position[2]
            )?;
        }
        for v in &self.vertices {
            writeln!(
                out,
                "vn {:.9e} {:.9e} {:.9e}",
                v.normal[0], v.normal[1], v.normal[2]
            )?;
        }
        for f in &self.faces {
            // OBJ indices are 1-based; vertex and normal lists are parallel.
            writeln!(
                out,
                "f {}//{} {}//{} {}//{}",
                f[0] + 1,
                f[0] + 1,
                f[1] + 1,
                f[1] + 1,
                f[2] + 1,
                f[2] + 1
            )?;
        }
        Ok(())
    }

    /// Binary little-endian PLY with float positions/normals and uchar-count
    /// int face lists.
    pub fn write_ply(&self, out: &mut dyn io::Write) -> io::Result<()> {
        write!(
            out,
            "ply\nformat binary_little_endian 1.0\nelement vertex {}\n\
             property float x\nproperty float y\nproperty float z\n\
             property float nx\nproperty float ny\nproperty float nz\n\
             element face {}\nproperty list uchar int vertex_indices\nend_header\n",
            self.vertices.len(),
            self.faces.len()
        )?;
        for v in &self.vertices {
            for value in v.position.iter().chain(v.normal.iter()) {
                out.write_all(&(*value as f32).to_le_bytes())?;
            }
        }
        for f in &self.faces {
            out.write_all(&[3u8])?;
            for &index in f {
                out.write_all(&(index as i32).to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// Lift the polar grid of radius rmax: center + nr rings of ntheta vertices.
pub fn lift_mesh(m: &HarmonicMap, nr: usize, ntheta: usize, rmax: f64) -> Result<Mesh> {
    if !(rmax > 0.0 && rmax < 1.0) {
        return Err(Error::Param(format!("rmax = {rmax} outside (0, 1)")));
    }
    if nr == 0 {
        return Err(Error::Param("need at least one ring".into()));
    }
    if ntheta < 3 {
        return Err(Error::Param("need at least three vertices per ring".into()));
    }
    let mut sources = Vec::with_capacity(nr * ntheta + 1);
    sources.push(Complex64::new(0.0, 0.0));
    for j in 1..=nr {
        let r = rmax * j as f64 / nr as f64;
        for k in 0..ntheta {
            let theta = std::f64::consts::TAU * k as f64 / ntheta as f64;
            sources.push(Complex64::from_polar(r, theta));
        }
    }
    let vertices: Vec<MeshVertex> = sources
        .par_iter()
        .map(|&z| {
            let p = lift::lift_point(m, z)?;
            let normal = lift::surface_normal(m, z)?;
            Ok(MeshVertex {
                position: p.position(),
                normal,
                source: z,
            })
        })
        .collect::<Result<_>>()?;
    // Ring j vertex k lives at 1 + (j−1)·ntheta + k.
    let at = |j: usize, k: usize| 1 + (j - 1) * ntheta + k % ntheta;
    let mut faces = Vec::with_capacity(ntheta * (2 * nr - 1));
    for k in 0..ntheta {
        faces.push([0, at(1, k), at(1, k + 1)]);
    }
    for j in 1..nr {
        for k in 0..ntheta {
            // Quad (j,k)-(j+1,k)-(j+1,k+1)-(j,k+1), split along the same
            // diagonal everywhere.
            faces.push([at(j, k), at(j + 1, k), at(j + 1, k + 1)]);
            faces.push([at(j, k), at(j + 1, k + 1), at(j, k + 1)]);
        }
    }
    Ok(Mesh { vertices, faces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::AnalyticFn;
    use crate::geom;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn identity_map() -> HarmonicMap {
        HarmonicMap::new(
            AnalyticFn::var(),
            AnalyticFn::zero(),
            AnalyticFn::zero(),
            Complex64::new(0.0, 0.0),
        )
        .unwrap()
    }

    fn catenoid(c: f64) -> HarmonicMap {
        let z = AnalyticFn::var();
        let h = z.scale(PI).exp().scale(c);
        let g = z.scale(-PI).exp().scale(1.0 / c);
        let q = AnalyticFn::constant(Complex64::new(0.0, 1.0 / c)).mul(&z.scale(-PI).exp());
        HarmonicMap::new(h, g, q, Complex64::new(0.0, 0.0)).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        let m = identity_map();
        assert!(lift_mesh(&m, 4, 12, 1.0).is_err());
        assert!(lift_mesh(&m, 4, 12, 0.0).is_err());
        assert!(lift_mesh(&m, 0, 12, 0.5).is_err());
        assert!(lift_mesh(&m, 4, 2, 0.5).is_err());
    }

    #[test]
    fn flat_disk_mesh() {
        let m = identity_map();
        let (nr, ntheta) = (5, 16);
        let mesh = lift_mesh(&m, nr, ntheta, 0.8).unwrap();
        assert_eq!(mesh.vertices().len(), nr * ntheta + 1);
        assert_eq!(mesh.faces().len(), ntheta * (2 * nr - 1));
        for v in mesh.vertices() {
            assert_eq!(v.position[2], 0.0);
            assert_abs_diff_eq!(v.position[0], v.source.re, epsilon = 1e-12);
            assert_abs_diff_eq!(v.position[1], v.source.im, epsilon = 1e-12);
            assert_abs_diff_eq!(
                geom::dist(v.normal, [0.0, 0.0, 1.0]),
                0.0,
                epsilon = 1e-12
            );
        }
        // Faces are counter-clockwise as seen from the normal side.
        for f in mesh.faces() {
            let [a, b, c] = f.map(|i| mesh.vertices()[i].position);
            let n = geom::cross(geom::sub(b, a), geom::sub(c, a));
            assert!(n[2] > 0.0);
            assert!(f[0] != f[1] && f[1] != f[2] && f[0] != f[2]);
        }
    }

    #[test]
    fn catenoid_mesh_satisfies_surface_equation() {
        let c = 60.0;
        let m = catenoid(c);
        let mesh = lift_mesh(&m, 10, 24, 0.99).unwrap();
        for v in mesh.vertices() {
            let x = v.source.re;
            let radius = c * (PI * x).exp() + (-PI * x).exp() / c;
            let r2 = v.position[0] * v.position[0] + v.position[1] * v.position[1];
            assert_relative_eq!(r2, radius * radius, max_relative = 1e-8);
            assert_abs_diff_eq!(v.position[2], 2.0 * PI * x, epsilon = 1e-9);
        }
    }

    #[test]
    fn vertex_normals_match_analytic_normals() {
        let m = catenoid(60.0);
        let mesh = lift_mesh(&m, 6, 12, 0.9).unwrap();
        let worst = mesh
            .vertices()
            .iter()
            .map(|v| geom::dist(v.normal, lift::surface_normal(&m, v.source).unwrap()))
            .fold(0.0, f64::max);
        assert!(worst <= 1e-6);
    }

    #[test]
    fn obj_export_is_well_formed() {
        let mesh = lift_mesh(&identity_map(), 3, 8, 0.5).unwrap();
        let mut buf = Vec::new();
        mesh.write_obj(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let v = text.lines().filter(|l| l.starts_with("v ")).count();
        let vn = text.lines().filter(|l| l.starts_with("vn ")).count();
        let f = text.lines().filter(|l| l.starts_with("f ")).count();
        assert_eq!(v, mesh.vertices().len());
        assert_eq!(vn, mesh.vertices().len());
        assert_eq!(f, mesh.faces().len());
        // Face indices are 1-based and in range.
        for line in text.lines().filter(|l| l.starts_with("f ")) {
            for corner in line.split_whitespace().skip(1) {
                let index: usize = corner.split("//").next().unwrap().parse().unwrap();
                assert!(index >= 1 && index <= v);
            }
        }
    }

    #[test]
    fn ply_export_round_trips_binary_payload() {
        let mesh = lift_mesh(&catenoid(60.0), 3, 8, 0.5).unwrap();
        let mut buf = Vec::new();
        mesh.write_ply(&mut buf).unwrap();
        let header_end = b"end_header\n";
        let pos = buf
            .windows(header_end.len())
            .position(|w| w == header_end)
            .unwrap()
            + header_end.len();
        let header = std::str::from_utf8(&buf[..pos]).unwrap();
        assert!(header.contains(&format!("element vertex {}", mesh.vertices().len())));
        assert!(header.contains(&format!("element face {}", mesh.faces().len())));
        let payload = &buf[pos..];
        let expect = 24 * mesh.vertices().len() + 13 * mesh.faces().len();
        assert_eq!(payload.len(), expect);
        // First vertex: six little-endian f32s.
        let first = &payload[..24];
        let mut values = [0.0f32; 6];
        for (i, chunk) in first.chunks(4).enumerate() {
            values[i] = f32::from_le_bytes(chunk.try_into().unwrap());
        }
        let v0 = &mesh.vertices()[0];
        for i in 0..3 {
            assert_relative_eq!(values[i] as f64, v0.position[i], max_relative = 1e-6);
        }
        // First face record: count byte then three i32 indices.
        let faces_start = 24 * mesh.vertices().len();
        assert_eq!(payload[faces_start], 3);
        let i0 = i32::from_le_bytes(payload[faces_start + 1..faces_start + 5].try_into().unwrap());
        assert_eq!(i0 as usize, mesh.faces()[0][0]);
    }
}
