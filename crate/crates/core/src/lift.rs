//! Weierstrass–Enneper lift of a planar harmonic map to a minimal surface in
//! R³, sampled curves on the lift, and Ahlfors' S1 Schwarzian along them.
//!
//! The lift of f = h + ḡ is f̃ = (U, V, W) with U + iV = f and
//! W = 2 Im ∫_{z0}^z h′q dζ. The first two coordinates are exact; only the
//! height needs quadrature. Along a curve, S1 is available two ways: by
//! fourth-order finite differences on the R³ samples, and — on the real
//! diameter — assembled from the decomposition
//! S1 = Re 𝒮f + ½e^{2σ}|K| + ½e^{2σ}κ_e², whose agreement is a strong
//! cross-check of the whole jet pipeline.

use num_complex::Complex64;
use std::io;

use crate::error::{Error, Result};
use crate::fd;
use crate::geom::{self, Vec3};
use crate::harmonic::HarmonicMap;
use crate::quad;
use crate::space_mobius::SpaceMobius;

/// Absolute tolerance for the height quadrature.
const HEIGHT_TOL: f64 = 1e-10;
/// Subdivision budget for the height quadrature.
const HEIGHT_BUDGET: usize = 1 << 12;
/// κ² − κ_i² below this signals a bug rather than roundoff.
const VARIANCE_FLOOR: f64 = -1e-9;

/// A point of the lifted surface.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePoint {
    /// U = Re f(source).
    pub u: f64,
    /// V = Im f(source).
    pub v: f64,
    /// W = 2 Im ∫ h′q dζ from the base point.
    pub w: f64,
    /// Disk parameter the point lifts.
    pub source: Complex64,
}

impl SurfacePoint {
    pub fn position(&self) -> Vec3 {
        [self.u, self.v, self.w]
    }
}

/// 2 Im ∫_a^b h′q dζ along the straight segment.
fn height_segment(m: &HarmonicMap, a: Complex64, b: Complex64) -> Result<f64> {
    let integral = quad::integrate_segment(
        |z| m.integrand_jet(z).map(|j| j.f0),
        a,
        b,
        HEIGHT_TOL,
        HEIGHT_BUDGET,
    )?;
    Ok(2.0 * integral.im)
}

/// Height from the base point: straight segment first, then a two-segment
/// detour via the origin before giving up.
fn height_from_base(m: &HarmonicMap, z: Complex64) -> Result<f64> {
    let z0 = m.base_point();
    match height_segment(m, z0, z) {
        Ok(w) => Ok(w),
        Err(_) => {
            let origin = Complex64::new(0.0, 0.0);
            let first =
                height_segment(m, z0, origin).map_err(|_| Error::Path { from: z0, to: z })?;
            let second =
                height_segment(m, origin, z).map_err(|_| Error::Path { from: z0, to: z })?;
            Ok(first + second)
        }
    }
}

pub fn lift_point(m: &HarmonicMap, z: Complex64) -> Result<SurfacePoint> {
    let f = m.value(z)?;
    let w = height_from_base(m, z)?;
    Ok(SurfacePoint {
        u: f.re,
        v: f.im,
        w,
        source: z,
    })
}

/// The coordinate partials f̃_x, f̃_y of the lift, from jets of h, g and the
/// integrand h′q.
fn coordinate_frame(m: &HarmonicMap, z: Complex64) -> Result<(Vec3, Vec3)> {
    let hp = m.h().jet(z)?.f1;
    let gp = m.g().jet(z)?.f1;
    let w = m.integrand_jet(z)?.f0;
    let fx = [(hp + gp).re, (hp - gp).im, 2.0 * w.im];
    let fy = [-(hp + gp).im, (hp - gp).re, 2.0 * w.re];
    Ok((fx, fy))
}

/// Unit normal of the lift, oriented as f̃_x × f̃_y (|f̃_x × f̃_y| = e^{2σ},
/// so the cross product never degenerates while a chart exists).
pub fn surface_normal(m: &HarmonicMap, z: Complex64) -> Result<Vec3> {
    let (fx, fy) = coordinate_frame(m, z)?;
    Ok(geom::normalize(geom::cross(fx, fy)))
}

/// One sample of a lifted curve.
#[derive(Debug, Clone, Copy)]
pub struct CurveSample {
    /// Curve parameter (plane arclength from the segment midpoint for
    /// [`LiftedCurve::along_segment`]).
    pub parameter: f64,
    pub point: SurfacePoint,
    /// dφ/dparameter.
    pub velocity: Vec3,
    /// |velocity| by the conformal route: e^σ·|dz/dparameter|.
    pub speed: f64,
    /// Unit surface normal; zero for raw curves that carry no surface.
    pub normal: Vec3,
}

/// A curve on the lifted surface, sampled on a uniform parameter grid.
#[derive(Debug, Clone)]
pub struct LiftedCurve {
    samples: Vec<CurveSample>,
    /// Cumulative arclength (trapezoid rule on the speeds).
    arclengths: Vec<f64>,
    step: f64,
}

impl LiftedCurve {
    /// Lift the straight segment [a, b] with n intervals. The parameter is
    /// plane arclength measured from the segment midpoint, so lifting a
    /// diameter [−r, r] gives parameter = x. Heights accumulate segment to
    /// segment; path independence of the analytic integrand keeps this in
    /// agreement with [`lift_point`].
    pub fn along_segment(
        m: &HarmonicMap,
        a: Complex64,
        b: Complex64,
        n: usize,
    ) -> Result<LiftedCurve> {
        let length = (b - a).norm();
        let tol = 1e-14 * (1.0 + a.norm() + b.norm());
        if length <= tol {
            return Err(Error::DegenerateInput { z1: a, z2: b, tol });
        }
        if n == 0 {
            return Err(Error::Param("segment needs at least one interval".into()));
        }
        let dir = (b - a) / length;
        let mid = 0.5 * (a + b);
        let step = length / n as f64;
        let mut samples = Vec::with_capacity(n + 1);
        let mut height = f64::NAN;
        let mut prev = Complex64::new(0.0, 0.0);
        for k in 0..=n {
            let t = step * (k as f64 - 0.5 * n as f64);
            let z = mid + t * dir;
            height = if k == 0 {
                height_from_base(m, z)?
            } else {
                height + height_segment(m, prev, z)?
            };
            prev = z;
            let f = m.value(z)?;
            let point = SurfacePoint {
                u: f.re,
                v: f.im,
                w: height,
                source: z,
            };
            let (fx, fy) = coordinate_frame(m, z)?;
            let velocity = geom::add(geom::scale(dir.re, fx), geom::scale(dir.im, fy));
            let speed = m.conformal_factor(z)?.conformal_factor();
            let normal = geom::normalize(geom::cross(fx, fy));
            samples.push(CurveSample {
                parameter: t,
                point,
                velocity,
                speed,
                normal,
            });
        }
        let arclengths = cumulative_arclength(&samples, step);
        Ok(LiftedCurve {
            samples,
            arclengths,
            step,
        })
    }

    /// Wrap raw R³ samples on a uniform parameter grid (for curves that are
    /// not lifts of a map: lines, circles, transformed data). Velocities come
    /// from finite differences (lower order at the ends), speeds are
    /// |velocity|, and the normal entries are zero since no surface is
    /// attached.
    pub fn from_points(start: f64, step: f64, points: &[Vec3]) -> Result<LiftedCurve> {
        if points.len() < 2 {
            return Err(Error::Param("curve needs at least two samples".into()));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Param("parameter step must be positive".into()));
        }
        let n = points.len();
        let mut samples = Vec::with_capacity(n);
        for (i, p) in points.iter().enumerate() {
            let velocity = if i >= 2 && i + 2 < n {
                fd::d1_vec(points, i, step)?
            } else if i == 0 {
                geom::scale(1.0 / step, geom::sub(points[1], points[0]))
            } else if i + 1 == n {
                geom::scale(1.0 / step, geom::sub(points[n - 1], points[n - 2]))
            } else {
                geom::scale(0.5 / step, geom::sub(points[i + 1], points[i - 1]))
            };
            samples.push(CurveSample {
                parameter: start + i as f64 * step,
                point: SurfacePoint {
                    u: p[0],
                    v: p[1],
                    w: p[2],
                    source: Complex64::new(f64::NAN, f64::NAN),
                },
                velocity,
                speed: geom::norm(velocity),
                normal: [0.0; 3],
            });
        }
        let arclengths = cumulative_arclength(&samples, step);
        Ok(LiftedCurve {
            samples,
            arclengths,
            step,
        })
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    pub fn arclengths(&self) -> &[f64] {
        &self.arclengths
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn positions(&self) -> Vec<Vec3> {
        self.samples.iter().map(|s| s.point.position()).collect()
    }
}

fn cumulative_arclength(samples: &[CurveSample], step: f64) -> Vec<f64> {
    let mut arclengths = Vec::with_capacity(samples.len());
    let mut total = 0.0;
    arclengths.push(0.0);
    for pair in samples.windows(2) {
        total += 0.5 * step * (pair[0].speed + pair[1].speed);
        arclengths.push(total);
    }
    arclengths
}

/// Ahlfors' S1 on raw uniform samples:
/// S1 = ⟨φ‴,φ′⟩/|φ′|² − 3⟨φ″,φ′⟩²/|φ′|⁴ + (3/2)|φ″|²/|φ′|²,
/// all derivatives by fourth-order central differences.
pub fn ahlfors_s1_samples(points: &[Vec3], index: usize, h: f64) -> Result<f64> {
    let d3 = fd::d3_vec(points, index, h)?;
    let d2 = fd::d2_vec(points, index, h)?;
    let d1 = fd::d1_vec(points, index, h)?;
    let v2 = geom::dot(d1, d1);
    if v2.sqrt() <= 1e-14 {
        return Err(Error::Search(
            "curve velocity vanishes; S1 undefined".into(),
        ));
    }
    Ok(geom::dot(d3, d1) / v2 - 3.0 * geom::dot(d2, d1).powi(2) / (v2 * v2)
        + 1.5 * geom::dot(d2, d2) / v2)
}

/// S1 at a curve sample from the R³ positions alone.
pub fn ahlfors_s1_numeric(c: &LiftedCurve, index: usize) -> Result<f64> {
    let points = c.positions();
    ahlfors_s1_samples(&points, index, c.step)
}

/// S1 of the lifted real diameter at x, assembled from
/// S1 = Re 𝒮f + ½e^{2σ}|K| + ½e^{2σ}κ_e² with κ_e² = κ² − κ_i²,
/// κ² = |φ′×φ″|²/|φ′|⁶ from jets along the real axis and κ_i = −σ_y e^{−σ}.
/// Returns (s1, re_sf, k_term, ke_term) with s1 = re_sf + k_term + ke_term.
pub fn ahlfors_s1_decomposed(m: &HarmonicMap, x: f64) -> Result<(f64, f64, f64, f64)> {
    if !(-1.0 < x && x < 1.0) {
        return Err(Error::Param(format!("x = {x} outside (-1, 1)")));
    }
    let z = Complex64::new(x, 0.0);
    let sj = m.conformal_factor(z)?;
    let hj = m.h().jet(z)?;
    let gj = m.g().jet(z)?;
    let wj = m.integrand_jet(z)?;
    // φ′ and φ″ of the lifted diameter x ↦ f̃(x).
    let c1 = [(hj.f1 + gj.f1).re, (hj.f1 - gj.f1).im, 2.0 * wj.f0.im];
    let c2 = [(hj.f2 + gj.f2).re, (hj.f2 - gj.f2).im, 2.0 * wj.f1.im];
    let v2 = geom::dot(c1, c1);
    let cr = geom::cross(c1, c2);
    let kappa2 = geom::dot(cr, cr) / (v2 * v2 * v2);
    let kappa_i = -sj.sigma_y * (-sj.sigma).exp();
    let mut ke2 = kappa2 - kappa_i * kappa_i;
    if ke2 < VARIANCE_FLOOR {
        return Err(Error::NegativeVariance { value: ke2 });
    }
    ke2 = ke2.max(0.0);
    let re_sf = m.schwarzian(z)?.re;
    let k_term = 0.5 * m.curvature_term(z)?;
    let ke_term = 0.5 * (2.0 * sj.sigma).exp() * ke2;
    Ok((re_sf + k_term + ke_term, re_sf, k_term, ke_term))
}

/// Pointwise image of a curve under a space Möbius map. Interior velocities
/// are recomputed by finite differences on the transformed positions; at the
/// ends, where the central stencil does not fit, the chain rule dT·φ′ is
/// used instead. Speeds pick up the conformal factor and normals are carried
/// by the orthogonal part of dT.
pub fn apply_space_mobius(t: &SpaceMobius, c: &LiftedCurve) -> Result<LiftedCurve> {
    let n = c.samples.len();
    let mut positions = Vec::with_capacity(n);
    let mut frames = Vec::with_capacity(n);
    for s in &c.samples {
        let (y, lambda, q) = t.apply_frame(s.point.position())?;
        positions.push(y);
        frames.push((lambda, q));
    }
    let mut samples = Vec::with_capacity(n);
    for (i, s) in c.samples.iter().enumerate() {
        let (lambda, q) = &frames[i];
        let velocity = if i >= 2 && i + 2 < n {
            fd::d1_vec(&positions, i, c.step)?
        } else {
            geom::scale(*lambda, q.apply(s.velocity))
        };
        let normal = if geom::norm(s.normal) > 0.0 {
            q.apply(s.normal)
        } else {
            [0.0; 3]
        };
        samples.push(CurveSample {
            parameter: s.parameter,
            point: SurfacePoint {
                u: positions[i][0],
                v: positions[i][1],
                w: positions[i][2],
                source: s.point.source,
            },
            velocity,
            speed: lambda * s.speed,
            normal,
        });
    }
    let arclengths = cumulative_arclength(&samples, c.step);
    Ok(LiftedCurve {
        samples,
        arclengths,
        step: c.step,
    })
}

/// CSV rows `x,u,v,w,speed,s1_numeric,s1_decomposed`. The S1 columns hold NaN
/// where the stencil does not fit (s1_numeric near the ends) or where the
/// decomposition does not apply (s1_decomposed off the real axis or without a
/// map).
pub fn curve_to_csv(
    c: &LiftedCurve,
    m: Option<&HarmonicMap>,
    out: &mut dyn io::Write,
) -> io::Result<()> {
    writeln!(out, "x,u,v,w,speed,s1_numeric,s1_decomposed")?;
    let points = c.positions();
    for (i, s) in c.samples.iter().enumerate() {
        let s1n = ahlfors_s1_samples(&points, i, c.step).unwrap_or(f64::NAN);
        let src = s.point.source;
        let s1l = match m {
            Some(map) if src.im.abs() <= 1e-12 * (1.0 + src.re.abs()) => {
                ahlfors_s1_decomposed(map, src.re)
                    .map(|r| r.0)
                    .unwrap_or(f64::NAN)
            }
            _ => f64::NAN,
        };
        writeln!(
            out,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            s.parameter, s.point.u, s.point.v, s.point.w, s.speed, s1n, s1l
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::AnalyticFn;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    const C: f64 = 60.0;

    /// h = c e^{πz}, g = c⁻¹e^{−πz}, q = (i/c)e^{−πz}; the lift is a catenoid
    /// and the height integrand h′q ≡ iπ.
    fn catenoid() -> HarmonicMap {
        let z = AnalyticFn::var();
        let h = z.scale(PI).exp().scale(C);
        let g = z.scale(-PI).exp().scale(1.0 / C);
        let q = AnalyticFn::constant(Complex64::new(0.0, 1.0 / C)).mul(&z.scale(-PI).exp());
        HarmonicMap::new(h, g, q, Complex64::new(0.0, 0.0)).unwrap()
    }

    /// h = e^z, g = (z² − 2z + 2)e^z, q = z: the height has the closed form
    /// W = 2 Im[(ζ − 1)e^ζ] between the endpoints.
    fn closed_height_map() -> HarmonicMap {
        let z = AnalyticFn::var();
        let ez = z.exp();
        let poly = z.mul(&z).sub(&z.scale(2.0)).add(&AnalyticFn::real(2.0));
        HarmonicMap::new(ez.clone(), poly.mul(&ez), z, Complex64::new(0.1, 0.2)).unwrap()
    }

    fn analytic_cubic() -> HarmonicMap {
        let z = AnalyticFn::var();
        let h = z.add(&z.mul(&z).mul(&z).scale(0.1));
        HarmonicMap::new(h, AnalyticFn::zero(), AnalyticFn::zero(), Complex64::new(0.0, 0.0))
            .unwrap()
    }

    fn catenoid_u(x: f64) -> f64 {
        C * (PI * x).exp() + (-PI * x).exp() / C
    }

    #[test]
    fn base_point_lifts_to_height_zero() {
        let m = catenoid();
        let p = lift_point(&m, Complex64::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(p.u, C + 1.0 / C, epsilon = 1e-12);
        assert_abs_diff_eq!(p.v, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.w, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn catenoid_lift_matches_parametrization() {
        let m = catenoid();
        for &(x, y) in &[(0.3, -0.4), (-0.5, 0.2), (0.0, 0.9), (0.7, 0.7)] {
            let p = lift_point(&m, Complex64::new(x, y)).unwrap();
            let r = catenoid_u(x);
            assert_abs_diff_eq!(p.u, r * (PI * y).cos(), epsilon = 1e-9);
            assert_abs_diff_eq!(p.v, r * (PI * y).sin(), epsilon = 1e-9);
            assert_abs_diff_eq!(p.w, 2.0 * PI * x, epsilon = 1e-9);
        }
    }

    #[test]
    fn catenoid_boundary_pair_lifts_to_one_point() {
        let m = catenoid();
        let plus = lift_point(&m, Complex64::new(0.0, 1.0)).unwrap();
        let minus = lift_point(&m, Complex64::new(0.0, -1.0)).unwrap();
        let expect = [-(C + 1.0 / C), 0.0, 0.0];
        assert_abs_diff_eq!(geom::dist(plus.position(), expect), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(geom::dist(minus.position(), expect), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn height_matches_closed_form_and_is_path_independent() {
        let m = closed_height_map();
        let z0 = m.base_point();
        let anti = |z: Complex64| (z - 1.0) * z.exp();
        for &(x, y) in &[(-0.3, 0.5), (0.4, -0.2), (0.6, 0.6), (-0.7, -0.1)] {
            let z = Complex64::new(x, y);
            let p = lift_point(&m, z).unwrap();
            assert_abs_diff_eq!(p.w, 2.0 * (anti(z) - anti(z0)).im, epsilon = 1e-9);
            // Straight route vs explicit detour via the origin.
            let straight = height_segment(&m, z0, z).unwrap();
            let detour =
                height_segment(&m, z0, Complex64::new(0.0, 0.0)).unwrap()
                    + height_segment(&m, Complex64::new(0.0, 0.0), z).unwrap();
            assert_abs_diff_eq!(straight, detour, epsilon = 1e-9);
        }
    }

    #[test]
    fn flat_lift_has_vertical_normal() {
        let m = analytic_cubic();
        for &(x, y) in &[(0.0, 0.0), (0.5, -0.3), (-0.6, 0.1)] {
            let n = surface_normal(&m, Complex64::new(x, y)).unwrap();
            assert_abs_diff_eq!(geom::dist(n, [0.0, 0.0, 1.0]), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn catenoid_normal_points_inward_at_zero() {
        let m = catenoid();
        let z = Complex64::new(0.0, 0.0);
        let n = surface_normal(&m, z).unwrap();
        assert_relative_eq!(geom::norm(n), 1.0, max_relative = 1e-12);
        assert!(n[0] < 0.0);
        // Vertical component from the dilatation root: |q(0)| = 1/c.
        let q2 = 1.0 / (C * C);
        assert_abs_diff_eq!(n[2], (1.0 - q2) / (1.0 + q2), epsilon = 1e-12);
        let (fx, fy) = coordinate_frame(&m, z).unwrap();
        assert_abs_diff_eq!(geom::dot(n, fx) / geom::norm(fx), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(geom::dot(n, fy) / geom::norm(fy), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn normal_matches_finite_difference_partials() {
        let m = closed_height_map();
        let h = 1e-4;
        for &(x, y) in &[(0.3, -0.2), (-0.4, 0.4)] {
            let z = Complex64::new(x, y);
            let stencil = |dir: Complex64| -> Vec<Vec3> {
                (-2..=2)
                    .map(|k| {
                        lift_point(&m, z + (k as f64) * h * dir)
                            .unwrap()
                            .position()
                    })
                    .collect()
            };
            let fx = fd::d1_vec(&stencil(Complex64::new(1.0, 0.0)), 2, h).unwrap();
            let fy = fd::d1_vec(&stencil(Complex64::new(0.0, 1.0)), 2, h).unwrap();
            let n_fd = geom::normalize(geom::cross(fx, fy));
            let n = surface_normal(&m, z).unwrap();
            assert_abs_diff_eq!(geom::dist(n, n_fd), 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn lifted_diameter_invariants() {
        let m = catenoid();
        let c = LiftedCurve::along_segment(
            &m,
            Complex64::new(-0.75, 0.0),
            Complex64::new(0.75, 0.0),
            1500,
        )
        .unwrap();
        assert_eq!(c.len(), 1501);
        assert_abs_diff_eq!(c.samples()[750].parameter, 0.0, epsilon = 1e-15);
        for s in c.samples().iter().step_by(50) {
            assert_relative_eq!(s.speed, geom::norm(s.velocity), max_relative = 1e-6);
            assert!(geom::dot(s.normal, s.velocity).abs() <= 1e-8 * geom::norm(s.velocity));
            // Sanity for the σ route: speed = e^σ along a unit-speed plane
            // parameter.
            assert_relative_eq!(
                s.speed,
                PI * catenoid_u(s.parameter),
                max_relative = 1e-12
            );
        }
        // Heights accumulated along the curve agree with the direct lift.
        let direct = lift_point(&m, Complex64::new(0.6, 0.0)).unwrap();
        let k = c
            .samples()
            .iter()
            .position(|s| (s.parameter - 0.6).abs() < 1e-9)
            .unwrap();
        assert_abs_diff_eq!(c.samples()[k].point.w, direct.w, epsilon = 1e-9);
        // Total arclength against the closed form (c + 1/c)(e^{πr} − e^{−πr}).
        let r = 0.75;
        let expect = (C + 1.0 / C) * ((PI * r).exp() - (-PI * r).exp());
        assert_relative_eq!(
            c.arclengths()[c.len() - 1],
            expect,
            max_relative = 1e-5
        );
        let increasing = c.arclengths().windows(2).all(|w| w[1] > w[0]);
        assert!(increasing);
    }

    #[test]
    fn s1_of_straight_line_vanishes() {
        let points: Vec<Vec3> = (0..64)
            .map(|k| {
                let t = k as f64 * 0.05;
                [0.3 + 2.0 * t, -1.0 + 0.5 * t, t]
            })
            .collect();
        let c = LiftedCurve::from_points(0.0, 0.05, &points).unwrap();
        for index in [10, 31, 55] {
            assert_abs_diff_eq!(ahlfors_s1_numeric(&c, index).unwrap(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn s1_of_circle_is_one_half_for_any_radius() {
        let h = 2.0 * PI / 720.0;
        for radius in [1.0, 2.5] {
            let points: Vec<Vec3> = (0..720)
                .map(|k| {
                    let t = k as f64 * h;
                    [radius * t.cos(), radius * t.sin(), 0.0]
                })
                .collect();
            let c = LiftedCurve::from_points(0.0, h, &points).unwrap();
            for index in [100, 360, 600] {
                assert_abs_diff_eq!(
                    ahlfors_s1_numeric(&c, index).unwrap(),
                    0.5,
                    epsilon = 1e-6
                );
            }
        }
    }

    #[test]
    fn s1_of_extremal_scalar_curve_doubles_the_weight() {
        // φ = (Φ, 0, 0) with Φ = atanh x, the extremal of p = (1−x²)⁻²:
        // S1φ = 𝒮Φ = 2p.
        let h = 1.5e-3;
        let points: Vec<Vec3> = (0..=800)
            .map(|k| {
                let x: f64 = -0.6 + k as f64 * h;
                [x.atanh(), 0.0, 0.0]
            })
            .collect();
        let c = LiftedCurve::from_points(-0.6, h, &points).unwrap();
        for index in [100usize, 400, 600] {
            let x = -0.6 + index as f64 * h;
            let expect = 2.0 / (1.0 - x * x).powi(2);
            assert_relative_eq!(
                ahlfors_s1_numeric(&c, index).unwrap(),
                expect,
                max_relative = 1e-6
            );
        }
    }

    #[test]
    fn s1_needs_interior_neighbors() {
        let points: Vec<Vec3> = (0..10).map(|k| [k as f64, 0.0, 0.0]).collect();
        let c = LiftedCurve::from_points(0.0, 1.0, &points).unwrap();
        assert!(matches!(
            ahlfors_s1_numeric(&c, 2),
            Err(Error::BoundaryIndex { needed: 3, .. })
        ));
        assert!(matches!(
            ahlfors_s1_numeric(&c, 8),
            Err(Error::BoundaryIndex { .. })
        ));
        assert!(ahlfors_s1_numeric(&c, 3).is_ok());
    }

    #[test]
    fn s1_decomposition_reduces_to_classical_schwarzian_for_analytic_maps() {
        let m = analytic_cubic();
        for x in [-0.5, 0.0, 0.4] {
            let (s1, re_sf, k_term, ke_term) = ahlfors_s1_decomposed(&m, x).unwrap();
            let sh = m.h().jet(Complex64::new(x, 0.0)).unwrap();
            let classical = sh.schwarzian(Complex64::new(x, 0.0)).unwrap();
            assert_abs_diff_eq!(s1, classical.re, epsilon = 1e-12);
            assert_abs_diff_eq!(s1, re_sf, epsilon = 1e-15);
            assert_eq!(k_term, 0.0);
            assert_abs_diff_eq!(ke_term, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn s1_decomposition_agrees_with_numeric_s1_on_the_diameter() {
        let m = catenoid();
        let c = LiftedCurve::along_segment(
            &m,
            Complex64::new(-0.75, 0.0),
            Complex64::new(0.75, 0.0),
            1500,
        )
        .unwrap();
        for (index, x) in [(250usize, -0.5), (750, 0.0), (1250, 0.5)] {
            let numeric = ahlfors_s1_numeric(&c, index).unwrap();
            let (s1, _, _, _) = ahlfors_s1_decomposed(&m, x).unwrap();
            assert_abs_diff_eq!(s1, numeric, epsilon = 1e-5);
        }
    }

    #[test]
    fn s1_decomposition_inequality_and_line_of_curvature_equality() {
        let m = catenoid();
        for k in 0..=60 {
            let x = -0.9 + 0.03 * k as f64;
            let (s1, re_sf, k_term, ke_term) = ahlfors_s1_decomposed(&m, x).unwrap();
            // S1 ≤ Re 𝒮f + e^{2σ}|K|, i.e. κ_e² ≤ |K| on a minimal surface.
            assert!(s1 <= re_sf + 2.0 * k_term + 1e-9);
            // The diameter lifts into a meridian, a line of curvature, so the
            // bound is attained.
            assert_relative_eq!(ke_term, k_term, max_relative = 1e-9);
        }
    }

    #[test]
    fn space_mobius_identity_preserves_curve() {
        let m = catenoid();
        let c = LiftedCurve::along_segment(
            &m,
            Complex64::new(-0.4, 0.0),
            Complex64::new(0.4, 0.0),
            200,
        )
        .unwrap();
        let t = SpaceMobius::identity();
        let image = apply_space_mobius(&t, &c).unwrap();
        for (a, b) in c.samples().iter().zip(image.samples()) {
            assert_abs_diff_eq!(
                geom::dist(a.point.position(), b.point.position()),
                0.0,
                epsilon = 0.0
            );
            assert_eq!(a.speed, b.speed);
            // Interior velocities come back through the finite-difference
            // pipeline, so exactness is only up to stencil truncation.
            assert_abs_diff_eq!(
                geom::dist(a.velocity, b.velocity),
                0.0,
                epsilon = 1e-6 * a.speed
            );
            assert_abs_diff_eq!(geom::dist(a.normal, b.normal), 0.0, epsilon = 0.0);
        }
    }

    #[test]
    fn s1_is_mobius_invariant_along_the_diameter() {
        let m = catenoid();
        let c = LiftedCurve::along_segment(
            &m,
            Complex64::new(-0.75, 0.0),
            Complex64::new(0.75, 0.0),
            1500,
        )
        .unwrap();
        // The image of the diameter stays far from the origin (U ≥ 2), so
        // the inversion is regular on it.
        let inversion = SpaceMobius::identity().inversion();
        let dilation = SpaceMobius::identity().dilation(3.0);
        let inverted = apply_space_mobius(&inversion, &c).unwrap();
        let dilated = apply_space_mobius(&dilation, &c).unwrap();
        for index in (100..=1400).step_by(100) {
            let before = ahlfors_s1_numeric(&c, index).unwrap();
            assert_abs_diff_eq!(
                ahlfors_s1_numeric(&inverted, index).unwrap(),
                before,
                epsilon = 1e-4
            );
            assert_abs_diff_eq!(
                ahlfors_s1_numeric(&dilated, index).unwrap(),
                before,
                epsilon = 1e-6
            );
        }
        // Transformed samples keep the speed/velocity and orthogonality
        // contracts.
        for s in inverted.samples().iter().step_by(100) {
            assert_relative_eq!(s.speed, geom::norm(s.velocity), max_relative = 1e-6);
            assert!(geom::dot(s.normal, s.velocity).abs() <= 1e-8 * geom::norm(s.velocity));
        }
    }

    #[test]
    fn inversion_pole_is_reported_on_curves() {
        let points: Vec<Vec3> = (0..16)
            .map(|k| [k as f64 - 8.0, 0.0, 0.0])
            .collect();
        let c = LiftedCurve::from_points(-8.0, 1.0, &points).unwrap();
        let t = SpaceMobius::identity().inversion();
        assert!(matches!(
            apply_space_mobius(&t, &c),
            Err(Error::InversionPole { .. })
        ));
    }

    #[test]
    fn frenet_decomposition_residual_is_small() {
        let m = catenoid();
        let c = LiftedCurve::along_segment(
            &m,
            Complex64::new(-0.75, 0.0),
            Complex64::new(0.75, 0.0),
            1500,
        )
        .unwrap();
        let points = c.positions();
        let speeds: Vec<f64> = c.samples().iter().map(|s| s.speed).collect();
        let h = c.step();
        for index in (100..=1400).step_by(100) {
            let s1 = ahlfors_s1_samples(&points, index, h).unwrap();
            let v = speeds[index];
            let vp = fd::d1(&speeds, index, h).unwrap();
            let vpp = fd::d2(&speeds, index, h).unwrap();
            let schwarzian_s = vpp / v - 1.5 * (vp / v).powi(2);
            let d1 = fd::d1_vec(&points, index, h).unwrap();
            let d2 = fd::d2_vec(&points, index, h).unwrap();
            let cr = geom::cross(d1, d2);
            let kappa2 = geom::dot(cr, cr) / geom::dot(d1, d1).powi(3);
            assert_abs_diff_eq!(s1, schwarzian_s + 0.5 * v * v * kappa2, epsilon = 1e-4);
        }
    }

    #[test]
    fn theorem_b_speed_bound_after_normalization() {
        // Example satisfying |𝒮f| + e^{2σ}|K| = π²/2 = 2p along the diameter
        // (p ≡ π²/4). Normalize the lifted diameter at 0 — unit speed and no
        // tangential acceleration — and compare speeds against Φ′ = sec².
        let m = catenoid();
        let n = 1801usize; // odd: no sample lands exactly on the inversion chain's pole
        let c = LiftedCurve::along_segment(
            &m,
            Complex64::new(-0.9, 0.0),
            Complex64::new(0.9, 0.0),
            n,
        )
        .unwrap();
        // Curve data at x = 0 from jets.
        let z = Complex64::new(0.0, 0.0);
        let p0 = lift_point(&m, z).unwrap().position();
        let (fx, _) = coordinate_frame(&m, z).unwrap();
        let v0 = geom::norm(fx);
        let tangent = geom::scale(1.0 / v0, fx);
        let hj = m.h().jet(z).unwrap();
        let gj = m.g().jet(z).unwrap();
        let wj = m.integrand_jet(z).unwrap();
        let c2 = [
            (hj.f2 + gj.f2).re,
            (hj.f2 - gj.f2).im,
            2.0 * wj.f1.im,
        ];
        // After translating to 0 and scaling to unit speed, the tangential
        // second derivative is α; the special conformal map with b = −(α/2)t̂
        // removes it while fixing 0 and the speed there.
        let alpha = geom::dot(c2, tangent) / v0;
        let b = geom::scale(-0.5 * alpha, tangent);
        let t = SpaceMobius::identity()
            .translation(geom::scale(-1.0, p0))
            .dilation(1.0 / v0)
            .inversion()
            .translation(geom::scale(-1.0, b))
            .inversion();
        let normalized = apply_space_mobius(&t, &c).unwrap();
        for s in normalized.samples() {
            let x = s.parameter;
            let phi1 = 1.0 / (0.5 * PI * x).cos().powi(2);
            assert!(
                s.speed <= phi1 * (1.0 + 1e-6),
                "speed {} exceeds Φ′ {} at x = {}",
                s.speed,
                phi1,
                x
            );
        }
        // Normalization sanity: unit speed at the mid samples.
        let mid = &normalized.samples()[n / 2..=n / 2 + 1];
        for s in mid {
            assert_relative_eq!(s.speed, 1.0, max_relative = 1e-5);
        }
    }

    #[test]
    fn csv_round_trip_has_expected_columns() {
        let m = catenoid();
        let c = LiftedCurve::along_segment(
            &m,
            Complex64::new(-0.4, 0.0),
            Complex64::new(0.4, 0.0),
            16,
        )
        .unwrap();
        let mut buf = Vec::new();
        curve_to_csv(&c, Some(&m), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 18);
        assert_eq!(lines[0], "x,u,v,w,speed,s1_numeric,s1_decomposed");
        let fields: Vec<Vec<f64>> = lines[1..]
            .iter()
            .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
            .collect();
        // Stencil margin: first and last three rows carry NaN S1.
        for row in [0, 1, 2, 14, 15, 16] {
            assert!(fields[row][5].is_nan());
        }
        for (row, field) in fields.iter().enumerate() {
            let x = -0.4 + row as f64 * 0.05;
            assert_abs_diff_eq!(field[0], x, epsilon = 1e-12);
            assert_abs_diff_eq!(field[1], catenoid_u(x), epsilon = 1e-9);
            assert_abs_diff_eq!(field[3], 2.0 * PI * x, epsilon = 1e-9);
            // Lemma-1 S1 is defined at every real sample.
            let (s1, _, _, _) = ahlfors_s1_decomposed(&m, x).unwrap();
            assert_abs_diff_eq!(field[6], s1, epsilon = 1e-12);
        }
        let mid = 8;
        assert_abs_diff_eq!(fields[mid][5], fields[mid][6], epsilon = 1e-3);
    }
}
