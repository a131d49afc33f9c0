//! Falsifier-style checks of the univalence criterion.
//!
//! The theorems behind the criterion are audited, not proved: margins of
//! 2p(|z|) − |𝒮f| − e^{2σ}|K| are evaluated on polar grids, lifts are
//! scanned for collisions between plane-separated points, the sharpness
//! families are pushed to their advertised equality sets, and the Möbius
//! transfer identities behind the boundary argument are replayed on real
//! grids. A criterion that holds should produce collision-free scans; one
//! scaled past its sharp constant should produce located collisions.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use crate::catalogue::{ExampleFamily, ExampleMap};
use crate::error::{Error, Result};
use crate::expr::AnalyticFn;
use crate::fd;
use crate::geom::{self, Vec3};
use crate::harmonic::HarmonicMap;
use crate::lift::{lift_point, LiftedCurve};
use crate::mobius::DiskMobius;
use crate::nehari::NehariFunction;

/// Margins below −tol fail a criterion check.
pub const DEFAULT_CRITERION_TOL: f64 = 1e-9;
/// Margins within this multiple of tol of zero join the equality locus.
const EQUALITY_BAND: f64 = 10.0;
/// |z| ≥ this fraction of rmax marks a collision as boundary.
const BOUNDARY_BAND: f64 = 0.95;
/// A pair collides when its 3D distance is below FRAC·sep·min(e^σ).
const COLLISION_FRAC: f64 = 0.25;
/// Sunflower layout angle 2π(1 − 1/φ).
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
/// Interior shrink applied to level arcs so samples stay in the open disk.
const ARC_SHRINK: f64 = 0.01;

/// Polar evaluation grid for [`check_criterion`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriterionGrid {
    pub nr: usize,
    pub ntheta: usize,
    pub rmax: f64,
    pub tol: f64,
}

impl CriterionGrid {
    pub fn new(nr: usize, ntheta: usize, rmax: f64) -> Result<Self> {
        if nr < 2 || ntheta < 4 {
            return Err(Error::Param(format!(
                "criterion grid needs nr ≥ 2 and ntheta ≥ 4, got {nr}×{ntheta}"
            )));
        }
        if !(rmax > 0.0 && rmax < 1.0) {
            return Err(Error::Param(format!("rmax must lie in (0,1), got {rmax}")));
        }
        Ok(CriterionGrid {
            nr,
            ntheta,
            rmax,
            tol: DEFAULT_CRITERION_TOL,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

impl Default for CriterionGrid {
    fn default() -> Self {
        CriterionGrid {
            nr: 60,
            ntheta: 60,
            rmax: 0.95,
            tol: DEFAULT_CRITERION_TOL,
        }
    }
}

/// Margins of the criterion on a polar grid.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub nr: usize,
    pub ntheta: usize,
    pub rmax: f64,
    pub tol: f64,
    /// Row-major: margins[i·ntheta + j] at radius index i, angle index j.
    pub margins: Vec<f64>,
    pub min_margin: f64,
    /// (r, θ) of the minimal margin.
    pub argmin: [f64; 2],
    /// Grid points with |margin| ≤ 10·tol.
    pub equality_locus: Vec<[f64; 2]>,
    pub pass: bool,
}

impl CriterionReport {
    /// (r, θ) of the grid node behind margins[i·ntheta + j].
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.rmax * (i as f64 + 1.0) / self.nr as f64,
            TAU * j as f64 / self.ntheta as f64,
        )
    }
}

/// Evaluate 2p(|z|) − |𝒮f(z)| − e^{2σ}|K|(z) over the grid. Radii run
/// rmax·(i+1)/nr (the outermost ring sits at rmax), angles 2πj/ntheta.
pub fn check_criterion(
    m: &HarmonicMap,
    p: &NehariFunction,
    grid: &CriterionGrid,
) -> Result<CriterionReport> {
    let points: Vec<(f64, f64)> = (0..grid.nr)
        .flat_map(|i| {
            let r = grid.rmax * (i as f64 + 1.0) / grid.nr as f64;
            (0..grid.ntheta).map(move |j| (r, TAU * j as f64 / grid.ntheta as f64))
        })
        .collect();
    let margins: Vec<f64> = points
        .par_iter()
        .map(|&(r, th)| criterion_margin(m, p, Complex64::from_polar(r, th)))
        .collect::<Result<_>>()?;

    let (mut min_margin, mut argmin) = (f64::INFINITY, [0.0, 0.0]);
    let mut equality_locus = Vec::new();
    for (k, &margin) in margins.iter().enumerate() {
        let (r, th) = points[k];
        if margin < min_margin {
            min_margin = margin;
            argmin = [r, th];
        }
        if margin.abs() <= EQUALITY_BAND * grid.tol {
            equality_locus.push([r, th]);
        }
    }
    Ok(CriterionReport {
        nr: grid.nr,
        ntheta: grid.ntheta,
        rmax: grid.rmax,
        tol: grid.tol,
        margins,
        min_margin,
        argmin,
        equality_locus,
        pass: min_margin >= -grid.tol,
    })
}

/// The pointwise criterion margin 2p(|z|) − |𝒮f(z)| − e^{2σ}|K|(z).
pub fn criterion_margin(m: &HarmonicMap, p: &NehariFunction, z: Complex64) -> Result<f64> {
    let s = m.schwarzian(z)?;
    let k = m.curvature_term(z)?;
    Ok(2.0 * p.value(z.norm())? - s.norm() - k)
}

/// Margin of the reduced sharpness inequality for the atanh composition:
/// the criterion with both sides divided by 2|F′|² = 2/|1−z²|², using
/// 𝒮F = 2F′². Vanishes identically on the real axis for admissible c.
pub fn strip_reduced_margin(f: &AnalyticFn, c: f64, z: Complex64) -> Result<f64> {
    let d = 1.0 - z.norm_sqr();
    if d <= 0.0 {
        return Err(Error::OutOfRange {
            r: z.norm(),
            rmax: 1.0,
        });
    }
    let fv = f.value(z)?;
    let one = Complex64::new(1.0, 0.0);
    let c2 = c * c;
    let band = 1.0 + c2 * fv.norm_sqr();
    let x = 2.0 * c2 * (one + c2 * fv.conj() * fv.conj())
        / ((one + c2 * fv * fv) * band * band);
    let lhs = (one - x).norm() + 2.0 * c2 / (band * band);
    let rhs = (one - z * z).norm_sqr() / (d * d);
    Ok(rhs - lhs)
}

/// A point of the upper level arc |1−z²|/(1−|z|²) = √(1+t²): the circular
/// arc through ±1 centered at −i/t, radius √(1+t²)/t. The arc parameter
/// runs over (atan(1/t), π − atan(1/t)).
pub fn level_arc_point(t: f64, alpha: f64) -> Complex64 {
    Complex64::new(0.0, -1.0 / t) + Complex64::from_polar((1.0 + t * t).sqrt() / t, alpha)
}

/// Minimum reduced margin over the interior-shrunk upper level arc.
pub fn level_arc_min_margin(f: &AnalyticFn, c: f64, t: f64, n: usize) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Param(format!("arc level t must be positive, got {t}")));
    }
    if n < 2 {
        return Err(Error::Param("arc sweep needs at least two samples".into()));
    }
    let a0 = (1.0 / t).atan();
    let span = PI - 2.0 * a0;
    let (lo, hi) = (a0 + ARC_SHRINK * span, PI - a0 - ARC_SHRINK * span);
    let mut min = f64::INFINITY;
    for k in 0..n {
        let alpha = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        min = min.min(strip_reduced_margin(f, c, level_arc_point(t, alpha))?);
    }
    Ok(min)
}

/// One colliding (or closest) pair of a scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CollisionPair {
    pub z1: [f64; 2],
    pub z2: [f64; 2],
    pub dist3: f64,
    /// dist3 relative to the collision threshold FRAC·sep·min(e^σ).
    pub ratio: f64,
    pub boundary: bool,
}

/// Result of a collision scan over a lifted point cloud.
#[derive(Debug, Clone, Serialize)]
pub struct CollisionReport {
    pub n: usize,
    pub rmax: f64,
    pub sep: f64,
    pub samples: usize,
    pub interior_collisions: usize,
    pub boundary_collisions: usize,
    pub collisions: Vec<CollisionPair>,
    /// Plane-separated pair with the smallest threshold ratio among pairs
    /// within hash reach, colliding or not. Relative to the local scale,
    /// so a boundary cut point dominates generic low-e^σ regions.
    pub nearest: Option<CollisionPair>,
    /// No interior collisions were found.
    pub pass: bool,
}

/// Lift a sunflower cloud of n points (plus a rim ring at rmax, a multiple
/// of four points so ±i·rmax are sampled exactly) and search for pairs
/// that are separated by at least `sep` in the plane yet closer than
/// FRAC·sep·min(e^σ) in space. The hash cell is the largest collision
/// threshold, so no collision can be missed.
pub fn univalence_scan(
    m: &HarmonicMap,
    n: usize,
    rmax: f64,
    sep: f64,
) -> Result<CollisionReport> {
    if n < 16 {
        return Err(Error::Param(format!("scan needs at least 16 points, got {n}")));
    }
    if !(rmax > 0.0 && rmax < 1.0) {
        return Err(Error::Param(format!("rmax must lie in (0,1), got {rmax}")));
    }
    if !(sep > 0.0 && sep < 2.0) {
        return Err(Error::Param(format!("sep must lie in (0,2), got {sep}")));
    }

    let rim = ((0.04 * n as f64).ceil() as usize).max(64).div_ceil(4) * 4;
    let mut zs = Vec::with_capacity(n + rim);
    for k in 0..n {
        let r = rmax * ((k as f64 + 0.5) / n as f64).sqrt();
        zs.push(Complex64::from_polar(r, GOLDEN_ANGLE * k as f64));
    }
    for j in 0..rim {
        zs.push(Complex64::from_polar(rmax, TAU * j as f64 / rim as f64));
    }

    let lifted: Vec<(Vec3, f64)> = zs
        .par_iter()
        .map(|&z| {
            let p = lift_point(m, z)?;
            let es = m.conformal_factor(z)?.conformal_factor();
            Ok((p.position(), es))
        })
        .collect::<Result<_>>()?;

    let cell = lifted
        .iter()
        .map(|&(_, es)| COLLISION_FRAC * sep * es)
        .fold(0.0f64, f64::max);
    if !(cell > 0.0 && cell.is_finite()) {
        return Err(Error::Param(format!(
            "degenerate collision threshold {cell}"
        )));
    }
    let key = |p: Vec3| -> (i64, i64, i64) {
        (
            (p[0] / cell).floor() as i64,
            (p[1] / cell).floor() as i64,
            (p[2] / cell).floor() as i64,
        )
    };
    let mut bins: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, &(pos, _)) in lifted.iter().enumerate() {
        bins.entry(key(pos)).or_default().push(i);
    }

    let mut collisions = Vec::new();
    let mut nearest: Option<CollisionPair> = None;
    let boundary_radius = BOUNDARY_BAND * rmax;
    for (i, &(pi, esi)) in lifted.iter().enumerate() {
        let (kx, ky, kz) = key(pi);
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                for dz in -1..=1i64 {
                    let Some(cellmates) = bins.get(&(kx + dx, ky + dy, kz + dz)) else {
                        continue;
                    };
                    for &j in cellmates {
                        if j <= i {
                            continue;
                        }
                        if (zs[i] - zs[j]).norm() < sep {
                            continue;
                        }
                        let (pj, esj) = lifted[j];
                        let dist3 = geom::dist(pi, pj);
                        let threshold = COLLISION_FRAC * sep * esi.min(esj);
                        let pair = CollisionPair {
                            z1: [zs[i].re, zs[i].im],
                            z2: [zs[j].re, zs[j].im],
                            dist3,
                            ratio: dist3 / threshold,
                            boundary: zs[i].norm() >= boundary_radius
                                && zs[j].norm() >= boundary_radius,
                        };
                        if nearest.map_or(true, |b| pair.ratio < b.ratio) {
                            nearest = Some(pair);
                        }
                        if pair.ratio <= 1.0 {
                            collisions.push(pair);
                        }
                    }
                }
            }
        }
    }

    let boundary_collisions = collisions.iter().filter(|p| p.boundary).count();
    let interior_collisions = collisions.len() - boundary_collisions;
    Ok(CollisionReport {
        n,
        rmax,
        sep,
        samples: lifted.len(),
        interior_collisions,
        boundary_collisions,
        collisions,
        nearest,
        pass: interior_collisions == 0,
    })
}

/// Audit of the cut-point circle of the exponential family at t = 1.
#[derive(Debug, Clone, Serialize)]
pub struct CutPointReport {
    /// Common value of the lift at ±i.
    pub cut_value: [f64; 3],
    /// max over ±i of |lift − (−(c+1/c), 0, 0)|.
    pub cut_deviation: f64,
    /// The imaginary diameter lands on the circle U²+V² = (c+1/c)², W = 0.
    pub max_radius_deviation: f64,
    pub max_height_deviation: f64,
    /// Criterion margins along the diameter (equality set of the bound).
    pub max_margin_deviation: f64,
    /// |κ_e² − |K|| along the circle: a line of curvature on a minimal
    /// surface has normal curvature ±√|K|.
    pub max_curvature_deviation: f64,
    pub pass: bool,
}

/// Check that the imaginary diameter of the t = 1 exponential family maps
/// onto a closed circle through the common endpoint value, that the
/// criterion margin vanishes along it, and that it is a line of curvature.
pub fn cut_point_circle_audit(entry: &ExampleMap) -> Result<CutPointReport> {
    let c = match entry.family() {
        ExampleFamily::CatenoidExp { c, t } if (t - 1.0).abs() <= 1e-12 => *c,
        ExampleFamily::CatenoidExp { .. } => {
            return Err(Error::NotApplicable(
                "the cut circle closes only at scale t = 1".into(),
            ))
        }
        _ => {
            return Err(Error::NotApplicable(
                "the cut-circle audit applies to the exponential family".into(),
            ))
        }
    };
    let m = entry.map();
    let radius = c + 1.0 / c;
    let expected = [-radius, 0.0, 0.0];

    let mut cut_deviation = 0.0f64;
    let mut cut_value = [0.0; 3];
    for sign in [1.0, -1.0] {
        let lift = lift_point(m, Complex64::new(0.0, sign))?.position();
        cut_deviation = cut_deviation.max(geom::dist(lift, expected));
        if sign > 0.0 {
            cut_value = lift;
        }
    }

    let span = 0.995;
    let curve = LiftedCurve::along_segment(
        m,
        Complex64::new(0.0, -span),
        Complex64::new(0.0, span),
        398,
    )?;
    let positions = curve.positions();
    let samples = curve.samples();
    let p = NehariFunction::PiSqOverFour;

    let mut max_radius_deviation = 0.0f64;
    let mut max_height_deviation = 0.0f64;
    let mut max_margin_deviation = 0.0f64;
    let mut max_curvature_deviation = 0.0f64;
    for (i, s) in samples.iter().enumerate() {
        let pos = s.point.position();
        max_radius_deviation =
            max_radius_deviation.max(((pos[0] * pos[0] + pos[1] * pos[1]).sqrt() - radius).abs());
        max_height_deviation = max_height_deviation.max(pos[2].abs());
        max_margin_deviation =
            max_margin_deviation.max(criterion_margin(m, &p, s.point.source)?.abs());
        if i >= 2 && i + 2 < samples.len() {
            let acc = fd::d2_vec(&positions, i, curve.step())?;
            let kappa_e = geom::dot(acc, s.normal) / (s.speed * s.speed);
            let gauss = m.gauss_curvature(s.point.source)?.abs();
            max_curvature_deviation =
                max_curvature_deviation.max((kappa_e * kappa_e - gauss).abs());
        }
    }

    let pass = cut_deviation <= 1e-9
        && max_radius_deviation <= 1e-8
        && max_height_deviation <= 1e-8
        && max_margin_deviation <= 1e-9
        && max_curvature_deviation <= 1e-6;
    Ok(CutPointReport {
        cut_value,
        cut_deviation,
        max_radius_deviation,
        max_height_deviation,
        max_margin_deviation,
        max_curvature_deviation,
        pass,
    })
}

/// Transfer of the criterion to F = f∘T along the real diameter for the
/// involution T(z) = (iρ − z)/(1 + iρz).
#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub rho: f64,
    pub n: usize,
    /// min over the real grid of 2p(x) − |𝒮F(x)| − e^{2τ}|K|(x).
    pub min_margin: f64,
    /// Chain-rule residual of e^τ(x) = e^{σ(T(x))}|T′(x)|.
    pub max_factor_residual: f64,
    /// Chain-rule residual of 𝒮F(x) = 𝒮f(T(x))·T′(x)².
    pub max_schwarzian_residual: f64,
    pub pass: bool,
}

/// Precompose with the involution and replay the transferred criterion on
/// the real diameter: if 2p bounds |𝒮f| + e^{2σ}|K| on the disk, the same
/// weight bounds the composite along (−1, 1), by the monotonicity of
/// (1−x²)²p and |T(x)| ≥ |x|.
pub fn mobius_transfer_check(
    m: &HarmonicMap,
    p: &NehariFunction,
    rho: f64,
    n: usize,
) -> Result<TransferReport> {
    if n < 2 {
        return Err(Error::Param("transfer grid needs at least two points".into()));
    }
    let t = DiskMobius::new(rho, 0.0)?;
    let composed = m.precompose_special(&t)?;
    let mut min_margin = f64::INFINITY;
    let mut max_factor_residual = 0.0f64;
    let mut max_schwarzian_residual = 0.0f64;
    for k in 0..n {
        let x = -0.95 + 1.9 * k as f64 / (n - 1) as f64;
        let z = Complex64::new(x, 0.0);
        let tz = t.special(z);
        let tj = t.special_jet(z);

        let s_composed = composed.schwarzian(z)?;
        let s_chain = m.schwarzian(tz)? * tj.f1 * tj.f1;
        max_schwarzian_residual = max_schwarzian_residual
            .max((s_composed - s_chain).norm() / (1.0 + s_chain.norm()));

        let tau = composed.conformal_factor(z)?.conformal_factor();
        let chain = m.conformal_factor(tz)?.conformal_factor() * tj.f1.norm();
        max_factor_residual = max_factor_residual.max((tau - chain).abs() / (1.0 + chain.abs()));

        let margin = 2.0 * p.value(x)? - s_composed.norm() - composed.curvature_term(z)?;
        min_margin = min_margin.min(margin);
    }
    let pass = min_margin >= -DEFAULT_CRITERION_TOL
        && max_factor_residual <= 1e-9
        && max_schwarzian_residual <= 1e-9;
    Ok(TransferReport {
        rho,
        n,
        min_margin,
        max_factor_residual,
        max_schwarzian_residual,
        pass,
    })
}

/// (1−x²)²p(x) − (1−|T(x)|²)²p(|T(x)|) for the involution with parameter
/// rho; nonnegative since (1−x²)²p(x) is nonincreasing and |T(x)| ≥ |x|.
pub fn nehari_trick_margin(p: &NehariFunction, rho: f64, x: f64) -> Result<f64> {
    let t = DiskMobius::new(rho, 0.0)?;
    let tx = t.special(Complex64::new(x, 0.0)).norm();
    let a = (1.0 - x * x).powi(2) * p.value(x)?;
    let b = (1.0 - tx * tx).powi(2) * p.value(tx)?;
    Ok(a - b)
}

/// Fitted excess δ of the spiral family: the smallest δ with
/// |𝒮f| + e^{2σ}|K| ≤ (2+δ)/(1−|z|²)² over the grid.
pub fn hille_delta(entry: &ExampleMap, grid: &CriterionGrid) -> Result<f64> {
    if !matches!(entry.family(), ExampleFamily::Hille { .. }) {
        return Err(Error::NotApplicable(
            "the δ fit applies to the spiral family".into(),
        ));
    }
    let m = entry.map();
    let points: Vec<(f64, f64)> = (0..grid.nr)
        .flat_map(|i| {
            let r = grid.rmax * (i as f64 + 1.0) / grid.nr as f64;
            (0..grid.ntheta).map(move |j| (r, TAU * j as f64 / grid.ntheta as f64))
        })
        .collect();
    let excess: Vec<f64> = points
        .par_iter()
        .map(|&(r, th)| {
            let z = Complex64::from_polar(r, th);
            let s = m.schwarzian(z)?;
            let k = m.curvature_term(z)?;
            let d = 1.0 - z.norm_sqr();
            Ok((s.norm() + k) * d * d - 2.0)
        })
        .collect::<Result<_>>()?;
    Ok(excess.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Strip-coordinate witnesses of F = 1 for the spiral exponent ε: under
/// w = log((1+z)/(1−z)) the spiral is e^{iεw} and takes the value 1 at
/// w_k = 2πk/ε, real and interior to the strip |Im w| < π/2. The disk
/// preimages z_k = tanh(w_k/2) = 1 − 2e^{−w_k} + … are closer to 1 than
/// f64 can represent, which is why the audit lives in w.
pub fn hille_unity_witnesses(eps: f64, count: usize) -> Result<Vec<f64>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Param(format!(
            "spiral exponent ε must be positive, got {eps}"
        )));
    }
    Ok((1..=count).map(|k| TAU * k as f64 / eps).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::make_example;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn catenoid(c: f64, t: f64) -> ExampleMap {
        make_example(ExampleFamily::CatenoidExp { c, t }).unwrap()
    }

    fn strip(c: f64) -> ExampleMap {
        make_example(ExampleFamily::StripCatenoid {
            weight: NehariFunction::Nehari2,
            c,
        })
        .unwrap()
    }

    #[test]
    fn equality_family_margins_vanish_on_the_grid() {
        let entry = catenoid(60.0, 1.0);
        let grid = CriterionGrid::default();
        let report = check_criterion(
            entry.map(),
            entry.criterion_weight().unwrap(),
            &grid,
        )
        .unwrap();
        assert!(report.pass);
        assert_eq!(report.margins.len(), 3600);
        assert!(report.min_margin.abs() <= 1e-9, "{}", report.min_margin);
        let max = report.margins.iter().cloned().fold(f64::MIN, f64::max);
        assert!(max <= 1e-9);
        assert_eq!(report.equality_locus.len(), 3600);
    }

    #[test]
    fn undersized_coefficient_fails_near_the_boundary() {
        // The modulus band leaves e^σ < 2√2·π only for |Re z| > 0.9647 when
        // c = 50, so the failure is visible on a 0.999 grid and invisible
        // on the default 0.95 grid.
        let entry = catenoid(50.0, 1.0);
        let p = entry.criterion_weight().unwrap();
        let near = check_criterion(entry.map(), p, &CriterionGrid::new(60, 60, 0.999).unwrap())
            .unwrap();
        assert!(!near.pass);
        assert!(near.min_margin <= -1e-3, "{}", near.min_margin);
        assert_relative_eq!(near.argmin[0], 0.999, max_relative = 1e-12);
        assert_abs_diff_eq!(near.argmin[1], PI, epsilon = 1e-12);

        let default = check_criterion(entry.map(), p, &CriterionGrid::default()).unwrap();
        assert!(default.pass);
    }

    #[test]
    fn stretched_scale_fails_with_a_constant_margin() {
        // For t > 1 and c = 60 the absolute value still resolves on r ≤ 0.8,
        // so the margin is the constant (1 − t²)π²/2.
        let entry = catenoid(60.0, 1.2);
        let grid = CriterionGrid::new(40, 40, 0.8).unwrap();
        let report =
            check_criterion(entry.map(), entry.criterion_weight().unwrap(), &grid).unwrap();
        assert!(!report.pass);
        let expected = (1.0 - 1.44) * PI * PI / 2.0;
        for &m in &report.margins {
            assert_abs_diff_eq!(m, expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn stretched_scale_fails_on_the_default_grid_too() {
        let entry = catenoid(60.0, 1.1);
        let report = check_criterion(
            entry.map(),
            entry.criterion_weight().unwrap(),
            &CriterionGrid::default(),
        )
        .unwrap();
        assert!(!report.pass);
        assert!(report.min_margin <= -1e-3);
    }

    #[test]
    fn strip_composition_passes_its_weight() {
        let entry = strip(0.05);
        let grid = CriterionGrid::new(40, 40, 0.9).unwrap();
        let report =
            check_criterion(entry.map(), entry.criterion_weight().unwrap(), &grid).unwrap();
        assert!(report.pass, "min margin {}", report.min_margin);
        // Equality on the real axis puts grid points at θ ∈ {0, π} into
        // the locus.
        assert!(report.equality_locus.len() >= 2 * grid.nr);
    }

    #[test]
    fn reduced_margin_is_the_criterion_over_two_f_prime_squared() {
        let entry = strip(0.05);
        let f = entry.extremal().unwrap();
        let p = NehariFunction::Nehari2;
        let mut rng = ChaCha8Rng::seed_from_u64(0x2ed);
        for _ in 0..50 {
            let r = 0.9 * rng.gen::<f64>().sqrt();
            let th = TAU * rng.gen::<f64>();
            let z = Complex64::from_polar(r, th);
            let reduced = strip_reduced_margin(f, 0.05, z).unwrap();
            let full = criterion_margin(entry.map(), &p, z).unwrap();
            let fp2 = f.jet(z).unwrap().f1.norm_sqr();
            assert!(
                (reduced * 2.0 * fp2 - full).abs() <= 1e-9 * (1.0 + full.abs()),
                "at {z}: reduced·2|F′|² = {}, full = {full}",
                reduced * 2.0 * fp2
            );
        }
    }

    #[test]
    fn reduced_margin_vanishes_on_the_real_axis() {
        let entry = strip(0.05);
        let f = entry.extremal().unwrap();
        for k in 0..40 {
            let x = -0.975 + 1.95 * k as f64 / 39.0;
            let m = strip_reduced_margin(f, 0.05, Complex64::new(x, 0.0)).unwrap();
            assert_abs_diff_eq!(m, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn level_arcs_carry_positive_margin() {
        let entry = strip(0.05);
        let f = entry.extremal().unwrap();
        for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
            // The arc is a level set: the right-hand side is 1 + t² on it.
            let z = level_arc_point(t, PI / 2.0);
            let lhs = (Complex64::new(1.0, 0.0) - z * z).norm() / (1.0 - z.norm_sqr());
            assert_relative_eq!(lhs, (1.0 + t * t).sqrt(), max_relative = 1e-12);

            let min = level_arc_min_margin(f, 0.05, t, 200).unwrap();
            assert!(min > 0.0, "t = {t}: min = {min}");
        }
    }

    #[test]
    fn scan_flags_the_boundary_cut_but_no_interior_pair() {
        let entry = catenoid(60.0, 1.0);
        let report = univalence_scan(entry.map(), 1500, 0.999, 0.05).unwrap();
        assert!(report.pass);
        assert_eq!(report.interior_collisions, 0);
        assert!(report.boundary_collisions > 0);

        let nearest = report.nearest.unwrap();
        // The closest approach relative to local scale is the ±i·rmax rim
        // pair, whose chord is (c + 1/c)·2·sin(0.001π).
        let radius = 60.0 + 1.0 / 60.0;
        assert_relative_eq!(
            nearest.dist3,
            radius * 2.0 * (0.001 * PI).sin(),
            max_relative = 1e-6
        );
        for z in [nearest.z1, nearest.z2] {
            assert_abs_diff_eq!(z[0], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(z[1].abs(), 0.999, epsilon = 1e-12);
        }
    }

    #[test]
    fn scan_finds_interior_collisions_for_the_stretched_scale() {
        // t = 1.5 identifies (x, y) with (x, y − 4/3); the sunflower layout
        // puts sample pairs within the collision threshold along that
        // translation family.
        let entry = catenoid(60.0, 1.5);
        let report = univalence_scan(entry.map(), 4000, 0.95, 0.05).unwrap();
        assert!(!report.pass);
        assert!(report.interior_collisions > 0);
        let family_pair = report
            .collisions
            .iter()
            .filter(|p| !p.boundary)
            .find(|p| {
                (p.z1[0] - p.z2[0]).abs() <= 0.02
                    && ((p.z1[1] - p.z2[1]).abs() - 4.0 / 3.0).abs() <= 0.03
            });
        assert!(
            family_pair.is_some(),
            "no collision matches the translation family"
        );
    }

    #[test]
    fn scan_passes_for_the_univalent_composition() {
        let entry = strip(0.05);
        let report = univalence_scan(entry.map(), 600, 0.95, 0.05).unwrap();
        assert!(report.pass);
        assert!(report.collisions.is_empty());
    }

    #[test]
    fn cut_audit_reproduces_the_circle() {
        let entry = catenoid(60.0, 1.0);
        let report = cut_point_circle_audit(&entry).unwrap();
        assert!(report.pass, "{report:?}");
        let radius = 60.0 + 1.0 / 60.0;
        assert_abs_diff_eq!(report.cut_value[0], -radius, epsilon = 1e-9);
        assert_abs_diff_eq!(report.cut_value[1], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(report.cut_value[2], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn cut_audit_rejects_other_families() {
        assert!(matches!(
            cut_point_circle_audit(&catenoid(60.0, 1.5)),
            Err(Error::NotApplicable(_))
        ));
        assert!(matches!(
            cut_point_circle_audit(&strip(0.05)),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn transfer_keeps_the_criterion_on_the_diameter() {
        let entry = catenoid(60.0, 1.0);
        let p = NehariFunction::PiSqOverFour;
        for rho in [0.3, 0.7] {
            let report = mobius_transfer_check(entry.map(), &p, rho, 41).unwrap();
            assert!(report.pass, "rho = {rho}: {report:?}");
        }
        let entry = strip(0.05);
        let report =
            mobius_transfer_check(entry.map(), &NehariFunction::Nehari2, 0.5, 41).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn trick_margin_is_nonnegative_for_the_catalogue() {
        for p in [
            NehariFunction::PiSqOverFour,
            NehariFunction::Nehari2,
            NehariFunction::TwoOver,
            NehariFunction::OneOver,
        ] {
            for rho in [0.2, 0.6, 0.9] {
                for k in 0..41 {
                    let x = -0.95 + 1.9 * k as f64 / 40.0;
                    let m = nehari_trick_margin(&p, rho, x).unwrap();
                    assert!(m >= -1e-12, "p = {p:?}, rho = {rho}, x = {x}: {m}");
                }
            }
        }
    }

    #[test]
    fn spiral_excess_is_small_but_positive() {
        let entry = make_example(ExampleFamily::Hille {
            eps: 0.05,
            c: 0.02,
        })
        .unwrap();
        let grid = CriterionGrid::new(40, 40, 0.95).unwrap();
        let delta = hille_delta(&entry, &grid).unwrap();
        assert!(delta > 0.0, "δ = {delta}");
        assert!(delta <= 0.2, "δ = {delta}");
        assert!(hille_delta(&catenoid(60.0, 1.0), &grid).is_err());
    }

    #[test]
    fn spiral_unity_witnesses_live_in_the_strip() {
        let eps = 0.05;
        let ws = hille_unity_witnesses(eps, 2).unwrap();
        assert_eq!(ws.len(), 2);
        assert!(ws[0] != ws[1]);
        for w in ws {
            // Real strip coordinate: interior, and e^{iεw} returns to 1.
            let f_hat = (Complex64::new(0.0, eps) * w).exp();
            assert!((f_hat - 1.0).norm() <= 1e-12);
            assert!(w.is_finite() && w > 0.0);
        }
    }

    #[test]
    fn criterion_rejects_bad_grids() {
        assert!(CriterionGrid::new(1, 60, 0.95).is_err());
        assert!(CriterionGrid::new(60, 2, 0.95).is_err());
        assert!(CriterionGrid::new(60, 60, 1.0).is_err());
        let entry = catenoid(60.0, 1.0);
        assert!(univalence_scan(entry.map(), 8, 0.9, 0.05).is_err());
        assert!(univalence_scan(entry.map(), 100, 0.9, -1.0).is_err());
    }

    #[test]
    fn reports_serialize() {
        let entry = catenoid(60.0, 1.0);
        let grid = CriterionGrid::new(6, 8, 0.5).unwrap();
        let report =
            check_criterion(entry.map(), entry.criterion_weight().unwrap(), &grid).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["nr"], 6);
        assert!(json["pass"].as_bool().unwrap());

        let scan = univalence_scan(entry.map(), 64, 0.5, 0.05).unwrap();
        let json = serde_json::to_value(&scan).unwrap();
        assert!(json["nearest"].is_object());
    }
}
