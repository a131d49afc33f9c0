//! Fourth-order central finite differences on uniform grids.
//!
//! The same stencils serve sampled scalar data, sampled space curves, and
//! complex-analytic functions (stepping along the real direction, which for
//! an analytic function recovers the complex derivative).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::Vec3;

/// (offset, weight) pairs; the caller divides by the appropriate power of h.
pub const D1_STENCIL: [(isize, f64); 4] = [
    (-2, 1.0 / 12.0),
    (-1, -8.0 / 12.0),
    (1, 8.0 / 12.0),
    (2, -1.0 / 12.0),
];

pub const D2_STENCIL: [(isize, f64); 5] = [
    (-2, -1.0 / 12.0),
    (-1, 16.0 / 12.0),
    (0, -30.0 / 12.0),
    (1, 16.0 / 12.0),
    (2, -1.0 / 12.0),
];

pub const D3_STENCIL: [(isize, f64); 6] = [
    (-3, 1.0 / 8.0),
    (-2, -8.0 / 8.0),
    (-1, 13.0 / 8.0),
    (1, -13.0 / 8.0),
    (2, 8.0 / 8.0),
    (3, -1.0 / 8.0),
];

/// Samples needed on each side of the evaluation index.
pub const D1_MARGIN: usize = 2;
pub const D2_MARGIN: usize = 2;
pub const D3_MARGIN: usize = 3;

fn check_margin(i: usize, len: usize, needed: usize) -> Result<()> {
    if i < needed || i + needed >= len {
        Err(Error::BoundaryIndex {
            index: i,
            len,
            needed,
        })
    } else {
        Ok(())
    }
}

fn combine(samples: &[f64], i: usize, stencil: &[(isize, f64)]) -> f64 {
    stencil
        .iter()
        .map(|&(off, w)| w * samples[(i as isize + off) as usize])
        .sum()
}

pub fn d1(samples: &[f64], i: usize, h: f64) -> Result<f64> {
    check_margin(i, samples.len(), D1_MARGIN)?;
    Ok(combine(samples, i, &D1_STENCIL) / h)
}

pub fn d2(samples: &[f64], i: usize, h: f64) -> Result<f64> {
    check_margin(i, samples.len(), D2_MARGIN)?;
    Ok(combine(samples, i, &D2_STENCIL) / (h * h))
}

pub fn d3(samples: &[f64], i: usize, h: f64) -> Result<f64> {
    check_margin(i, samples.len(), D3_MARGIN)?;
    Ok(combine(samples, i, &D3_STENCIL) / (h * h * h))
}

fn combine_vec(samples: &[Vec3], i: usize, stencil: &[(isize, f64)]) -> Vec3 {
    let mut out = [0.0; 3];
    for &(off, w) in stencil {
        let s = samples[(i as isize + off) as usize];
        for (o, x) in out.iter_mut().zip(s) {
            *o += w * x;
        }
    }
    out
}

pub fn d1_vec(samples: &[Vec3], i: usize, h: f64) -> Result<Vec3> {
    check_margin(i, samples.len(), D1_MARGIN)?;
    let v = combine_vec(samples, i, &D1_STENCIL);
    Ok([v[0] / h, v[1] / h, v[2] / h])
}

pub fn d2_vec(samples: &[Vec3], i: usize, h: f64) -> Result<Vec3> {
    check_margin(i, samples.len(), D2_MARGIN)?;
    let v = combine_vec(samples, i, &D2_STENCIL);
    let h2 = h * h;
    Ok([v[0] / h2, v[1] / h2, v[2] / h2])
}

pub fn d3_vec(samples: &[Vec3], i: usize, h: f64) -> Result<Vec3> {
    check_margin(i, samples.len(), D3_MARGIN)?;
    let v = combine_vec(samples, i, &D3_STENCIL);
    let h3 = h * h * h;
    Ok([v[0] / h3, v[1] / h3, v[2] / h3])
}

fn sample_line<F>(f: F, z: Complex64, h: f64, half: usize) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    (0..=2 * half)
        .map(|k| f(z + Complex64::new((k as isize - half as isize) as f64 * h, 0.0)))
        .collect()
}

/// First complex derivative of an analytic function by real-direction steps.
pub fn d1_complex<F>(f: F, z: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let s = sample_line(f, z, h, D1_MARGIN)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for &(off, w) in &D1_STENCIL {
        acc += w * s[(D1_MARGIN as isize + off) as usize];
    }
    Ok(acc / h)
}

pub fn d2_complex<F>(f: F, z: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let s = sample_line(f, z, h, D2_MARGIN)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for &(off, w) in &D2_STENCIL {
        acc += w * s[(D2_MARGIN as isize + off) as usize];
    }
    Ok(acc / (h * h))
}

pub fn d3_complex<F>(f: F, z: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let s = sample_line(f, z, h, D3_MARGIN)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for &(off, w) in &D3_STENCIL {
        acc += w * s[(D3_MARGIN as isize + off) as usize];
    }
    Ok(acc / (h * h * h))
}
