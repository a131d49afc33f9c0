//! The conformal Schwarzian tensor, radial comparison metrics
//! Φ′(|z|)²|dz|² built from extremal profiles, convexity checks for the
//! comparison density u = e^{(φ−σ)/2}, and the distortion and
//! modulus-of-continuity estimators that follow from them.
//!
//! Tensor convention: the symmetric traceless matrix [[a, −b], [−b, −a]]
//! is identified with the complex number a + ib. In this identification
//! the Schwarzian tensor of a real potential ψ is 2(ψ_zz − ψ_z²), which
//! recovers the classical Schwarzian derivative when ψ = log|f′|. All
//! components are stored in the Euclidean frame; a conformal metric
//! g = e^{2φ}|dz|² enters only through the exact scaling
//! ‖B‖_g = e^{−2φ}‖B‖ and through its arclength s(r) = Φ(r) along radii,
//! which are geodesics of every radial metric.

use crate::error::{Error, Result};
use crate::fd;
use crate::geom::{self, Mat3};
use crate::harmonic::{HarmonicMap, SigmaJet};
use crate::lift;
use crate::nehari::{self, ExtremalProfile};
use crate::space_mobius::SpaceMobius;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

/// Bisection depth when inverting the arclength s = Φ(r).
const INVERT_ITERS: usize = 60;
/// Centered arclength step for the pointwise Hessian-identity residual.
const RESIDUAL_STEP: f64 = 5e-3;
/// Curvature level below which a lift is treated as planar: the density u
/// is then critical along a whole segment and the distortion bound takes
/// its closed analytic form instead of going through the descent probe.
const PLANAR_TOL: f64 = 1e-12;
/// Two descent endpoints within this distance count as one critical point.
const CLUSTER_RADIUS: f64 = 1e-3;
/// Interior fraction of the profile radius used by sampled checks.
const RADIAL_MARGIN: f64 = 0.98;
/// Samples along a radius for the ω convexity profile.
const OMEGA_SAMPLES: usize = 400;
/// Stride of the second-difference stencil in the ω report: the wider
/// stencil keeps the interpolation noise of exactly-flat profiles below
/// the pass threshold (second-difference noise scales like 1/(stride·ds)²).
const OMEGA_STRIDE: usize = 4;

/// Second-order Wirtinger jet of a real-valued potential ψ: the value,
/// ψ_z, and ψ_zz. For real ψ the remaining second-order data follows by
/// conjugation (ψ_z̄ = conj ψ_z, ψ_z̄z̄ = conj ψ_zz), so this is the whole
/// 2-jet.
#[derive(Debug, Clone, Copy)]
pub struct ScalarJet {
    pub value: f64,
    pub dz: Complex64,
    pub dzz: Complex64,
}

impl From<&SigmaJet> for ScalarJet {
    fn from(j: &SigmaJet) -> Self {
        ScalarJet {
            value: j.sigma,
            dz: j.sigma_z,
            dzz: j.sigma_zz,
        }
    }
}

/// Symmetric traceless 2-tensor [[a, −b], [−b, −a]] in the Euclidean
/// frame, identified with a + ib.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracelessTensor {
    pub a: f64,
    pub b: f64,
}

impl TracelessTensor {
    pub fn from_complex(c: Complex64) -> Self {
        TracelessTensor { a: c.re, b: c.im }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.a, -self.b], [-self.b, -self.a]]
    }

    /// Euclidean operator/frame norm; coincides with |a + ib|.
    pub fn euclidean_norm(&self) -> f64 {
        self.as_complex().norm()
    }

    /// Quadratic form on the unit direction e^{iθ}:
    /// B(e_θ, e_θ) = Re((a + ib) e^{2iθ}).
    pub fn contract(&self, theta: f64) -> f64 {
        (self.as_complex() * Complex64::from_polar(1.0, 2.0 * theta)).re
    }
}

/// Schwarzian tensor of the potential ψ in the Euclidean frame:
/// 2(ψ_zz − ψ_z²) in the complex identification. For ψ = log|f′| of an
/// analytic f this is the classical Schwarzian derivative of f; for the
/// conformal factor σ of a harmonic lift it matches the σ-route
/// Schwarzian.
pub fn schwarzian_tensor(psi: &ScalarJet) -> TracelessTensor {
    TracelessTensor::from_complex(2.0 * (psi.dzz - psi.dz * psi.dz))
}

/// Schwarzian tensor of ψ computed in the conformal metric e^{2ρ}|dz|²
/// rather than the Euclidean one: 2(ψ_zz − 2ρ_zψ_z − ψ_z²). Components
/// are still reported in the Euclidean frame.
pub fn schwarzian_tensor_in(rho: &ScalarJet, psi: &ScalarJet) -> TracelessTensor {
    TracelessTensor::from_complex(2.0 * (psi.dzz - 2.0 * rho.dz * psi.dz - psi.dz * psi.dz))
}

/// |B_ĝ(σ − φ) − (B(σ) − B(φ))| for ĝ = e^{2φ}|dz|²: the subtraction rule
/// for Schwarzian tensors. Algebraically zero — the covariant middle term
/// −2φ_z(σ_z − φ_z) is exactly what turns the difference of squares into
/// the square of the difference — so this is a consistency surface for
/// the bookkeeping, not a quantity.
pub fn subtraction_residual(sigma: &ScalarJet, varphi: &ScalarJet) -> f64 {
    let diff = ScalarJet {
        value: sigma.value - varphi.value,
        dz: sigma.dz - varphi.dz,
        dzz: sigma.dzz - varphi.dzz,
    };
    let covariant = schwarzian_tensor_in(varphi, &diff).as_complex();
    let plain = schwarzian_tensor(sigma).as_complex() - schwarzian_tensor(varphi).as_complex();
    (covariant - plain).norm()
}

/// The radial conformal metric g = Φ′(|z|)²|dz|² carried by an extremal
/// profile, with the Wirtinger jets of its potential φ = log Φ′(|z|).
///
/// Radial chain rule, with W = Φ″/Φ′ and A = ¼W² + W/(2r):
///   φ_z  = z̄ (A − W²/4)                 (W/(2r) = A − W²/4, regular at 0),
///   φ_zz = e^{−2iθ} (2p + W² − 2A) / 4   (W′ = 2p + W²/2, W/r = 2A − W²/2),
/// and the Schwarzian tensor of φ collapses to e^{−2iθ}(p − A).
#[derive(Debug, Clone)]
pub struct RadialMetric {
    profile: ExtremalProfile,
}

impl RadialMetric {
    /// Wrap a profile, checking the negative-curvature invariant A + p > 0
    /// on the grid (K_g = −2(A + p)/Φ′² must stay negative).
    pub fn new(profile: ExtremalProfile) -> Result<Self> {
        for &r in profile.grid() {
            let a = profile.coefficient_a(r)?;
            let p = profile.weight().value(r)?;
            if a + p <= 0.0 {
                return Err(Error::Param(format!(
                    "radial metric is not negatively curved: A + p = {:.3e} at r = {r:.6}",
                    a + p
                )));
            }
        }
        Ok(RadialMetric { profile })
    }

    pub fn profile(&self) -> &ExtremalProfile {
        &self.profile
    }

    /// φ(r) = log Φ′(r).
    pub fn phi(&self, r: f64) -> Result<f64> {
        Ok(self.profile.phi1(r)?.ln())
    }

    /// e^{φ} = Φ′(r).
    pub fn conformal_factor(&self, r: f64) -> Result<f64> {
        self.profile.phi1(r)
    }

    /// Wirtinger 2-jet of φ at z.
    pub fn phi_jet(&self, z: Complex64) -> Result<ScalarJet> {
        let r = z.norm();
        let value = self.phi(r)?;
        if r < 1e-12 {
            // φ_z = p(0)·z̄ + O(|z|³) and φ_zz = O(|z|²) both vanish at 0.
            return Ok(ScalarJet {
                value,
                dz: Complex64::new(0.0, 0.0),
                dzz: Complex64::new(0.0, 0.0),
            });
        }
        let a = self.profile.coefficient_a(r)?;
        let w = self.profile.w(r)?;
        let p = self.profile.weight().value(r)?;
        let unit2 = (z.conj() / r).powi(2);
        Ok(ScalarJet {
            value,
            dz: z.conj() * (a - 0.25 * w * w),
            dzz: unit2 * (2.0 * p + w * w - 2.0 * a) / 4.0,
        })
    }

    /// Schwarzian tensor of φ, from the collapsed closed form
    /// e^{−2iθ}(p − A).
    pub fn schwarzian_tensor(&self, z: Complex64) -> Result<TracelessTensor> {
        let r = z.norm();
        if r < 1e-12 {
            return Ok(TracelessTensor { a: 0.0, b: 0.0 });
        }
        let a = self.profile.coefficient_a(r)?;
        let p = self.profile.weight().value(r)?;
        let unit2 = (z.conj() / r).powi(2);
        Ok(TracelessTensor::from_complex(unit2 * (p - a)))
    }
}

/// Pointwise margin of the curvature-comparison inequality between a lift
/// and a radial metric, measured in the metric:
///
///   margin = ½|K_g| − ‖B_g(σ − φ)‖_g − e^{2(σ−φ)}|K|
///          = e^{−2φ} [ (A + p) − |ζ²𝒮f + A − p| − e^{2σ}|K| ],  ζ = z/|z|.
///
/// Nonnegative wherever |𝒮f| + e^{2σ}|K| ≤ 2p(|z|) (by A ≥ p and the
/// triangle inequality); exactly zero for the analytic extremal map of the
/// same weight at real z.
pub fn comparison_margin(m: &HarmonicMap, metric: &RadialMetric, z: Complex64) -> Result<f64> {
    let r = z.norm();
    let phi1 = metric.conformal_factor(r)?;
    let a = metric.profile().coefficient_a(r)?;
    let p = metric.profile().weight().value(r)?;
    let sf = m.schwarzian(z)?;
    let e2k = m.curvature_term(z)?;
    let zeta2 = if r < 1e-12 {
        Complex64::new(1.0, 0.0)
    } else {
        (z / r).powi(2)
    };
    Ok(((a + p) - (zeta2 * sf + (a - p)).norm() - e2k) / (phi1 * phi1))
}

/// The comparison density u(z) = (Φ′(|z|)/e^{σ(z)})^{1/2} = e^{(φ−σ)/2}.
pub fn u_function(m: &HarmonicMap, metric: &RadialMetric, z: Complex64) -> Result<f64> {
    let phi1 = metric.conformal_factor(z.norm())?;
    let sigma = m.conformal_factor(z)?;
    Ok((phi1 / sigma.conformal_factor()).sqrt())
}

/// Invert s = Φ(r) on [0, r_hi] by bisection; Φ is strictly increasing.
fn invert_phi(profile: &ExtremalProfile, s: f64, r_hi: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0_f64, r_hi);
    for _ in 0..INVERT_ITERS {
        let mid = 0.5 * (lo + hi);
        if profile.phi(mid)? < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Radii r_k with Φ(r_k) = k·ds uniform in metric arclength up to
/// RADIAL_MARGIN of the profile radius; returns (radii, ds).
fn arclength_grid(metric: &RadialMetric, n: usize) -> Result<(Vec<f64>, f64)> {
    let profile = metric.profile();
    let r_hi = RADIAL_MARGIN * profile.rmax();
    let s_hi = profile.phi(r_hi)?;
    let ds = s_hi / n as f64;
    let mut radii = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let r = if k == 0 {
            0.0
        } else if k == n {
            r_hi
        } else {
            invert_phi(profile, k as f64 * ds, r_hi)?
        };
        radii.push(r);
    }
    Ok((radii, ds))
}

/// Outcome of a sampled convexity check.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexityReport {
    pub check: &'static str,
    pub grid: usize,
    pub min_margin: f64,
    pub argmin: f64,
    pub pass: bool,
}

/// Convexity of u against the curvature term along the radius at angle θ:
/// checks d²u/ds² ≥ ¼ u⁻³ |K| at n−3 interior samples uniform in the
/// metric arclength s = Φ(r).
///
/// Radii are geodesics of every radial metric, so on g-unit vectors the
/// radial-radial Hessian of u is plainly d²u/ds²; |K| is the surface
/// curvature of the lift at f̃(z). Reports the minimum of the difference
/// (pass at ≥ −1e-6). Second-difference noise of the sampled profile
/// scales like n², so for maps whose margin is identically zero n should
/// stay modest (~100) for the noise floor to clear the threshold.
pub fn radial_hessian_check(
    m: &HarmonicMap,
    metric: &RadialMetric,
    theta: f64,
    n: usize,
) -> Result<ConvexityReport> {
    if n < 8 {
        return Err(Error::Param(format!("n = {n} samples is too coarse")));
    }
    let (radii, ds) = arclength_grid(metric, n)?;
    let dir = Complex64::from_polar(1.0, theta);
    let u: Vec<f64> = radii
        .iter()
        .map(|&r| u_function(m, metric, dir * r))
        .collect::<Result<_>>()?;
    let mut min_margin = f64::INFINITY;
    let mut argmin = 0.0;
    for k in 2..=n - 2 {
        let z = dir * radii[k];
        let rhs = 0.25 * u[k].powi(-3) * m.gauss_curvature(z)?.abs();
        let margin = fd::d2(&u, k, ds)? - rhs;
        if margin < min_margin {
            min_margin = margin;
            argmin = radii[k];
        }
    }
    Ok(ConvexityReport {
        check: "radial_hessian",
        grid: n,
        min_margin,
        argmin,
        pass: min_margin >= -1e-6,
    })
}

/// Residual of the Hessian identity for v = u² = e^{−(σ−φ)}, contracted
/// with the g-unit radial direction at z = r e^{iθ}:
///
///   d²v/ds² + v e^{−2φ} [Re(𝒮f e^{2iθ}) + A − p] − ½ e^{−2φ} Δv = 0,
///
/// with Δv = v (Δφ − Δσ + |∇(φ−σ)|²), Δφ = 2(A + p), Δσ = e^{2σ}|K|, and
/// |∇(φ−σ)|² = 4|φ_z − σ_z|². An identity for every map/metric pair, so
/// the residual is pure numerical error; it exercises at once the
/// Schwarzian pipeline, the radial jets, the curvature term, and the
/// arclength machinery.
pub fn hessian_equation_residual(
    m: &HarmonicMap,
    metric: &RadialMetric,
    r: f64,
    theta: f64,
) -> Result<f64> {
    let profile = metric.profile();
    let r_hi = RADIAL_MARGIN * profile.rmax();
    let s0 = profile.phi(r)?;
    let ds = RESIDUAL_STEP;
    if s0 - 2.0 * ds < 0.0 || s0 + 2.0 * ds > profile.phi(r_hi)? {
        return Err(Error::OutOfRange { r, rmax: r_hi });
    }
    let dir = Complex64::from_polar(1.0, theta);
    let mut v = [0.0_f64; 5];
    for (j, vj) in v.iter_mut().enumerate() {
        let s = s0 + (j as f64 - 2.0) * ds;
        let rj = invert_phi(profile, s, r_hi)?;
        let uj = u_function(m, metric, dir * rj)?;
        *vj = uj * uj;
    }
    let d2v = fd::d2(&v, 2, ds)?;

    let z = dir * r;
    let sigma = m.conformal_factor(z)?;
    let phi = metric.phi_jet(z)?;
    let a = profile.coefficient_a(r)?;
    let p = profile.weight().value(r)?;
    let e2k = m.curvature_term(z)?;
    let em2phi = (-2.0 * phi.value).exp();
    let v0 = (phi.value - sigma.sigma).exp();
    let contraction = (m.schwarzian(z)? * Complex64::from_polar(1.0, 2.0 * theta)).re + a - p;
    let grad2 = 4.0 * (phi.dz - sigma.sigma_z).norm_sqr();
    let lap_v = v0 * (2.0 * (a + p) - e2k + grad2);
    Ok((d2v + v0 * em2phi * contraction - 0.5 * em2phi * lap_v).abs())
}

/// e^{τ(z)} = λ_T(f̃(z)) · e^{σ(z)}: the conformal factor of the lift
/// post-composed with a Möbius transformation of space.
pub fn transferred_conformal_factor(
    m: &HarmonicMap,
    t: &SpaceMobius,
    z: Complex64,
) -> Result<f64> {
    let point = lift::lift_point(m, z)?;
    Ok(t.conformal_factor(point.position())? * m.conformal_factor(z)?.conformal_factor())
}

/// The density ω = (Φ′(r)/e^{τ})^{1/2} along the radius at angle θ,
/// sampled uniformly in the metric arclength s = Φ(r), together with a
/// second-difference convexity report (pass at ≥ −1e-6·max(1, max ω)).
#[derive(Debug, Clone)]
pub struct OmegaProfile {
    pub s: Vec<f64>,
    pub radii: Vec<f64>,
    pub omega: Vec<f64>,
    pub report: ConvexityReport,
}

pub fn omega_profile(
    m: &HarmonicMap,
    t: &SpaceMobius,
    metric: &RadialMetric,
    theta: f64,
) -> Result<OmegaProfile> {
    let n = OMEGA_SAMPLES;
    let (radii, ds) = arclength_grid(metric, n)?;
    let dir = Complex64::from_polar(1.0, theta);
    let mut s = Vec::with_capacity(n + 1);
    let mut omega = Vec::with_capacity(n + 1);
    for (k, &r) in radii.iter().enumerate() {
        let etau = transferred_conformal_factor(m, t, dir * r)?;
        s.push(k as f64 * ds);
        omega.push((metric.conformal_factor(r)? / etau).sqrt());
    }
    let mut min_margin = f64::INFINITY;
    let mut argmin = 0.0;
    let wide = OMEGA_STRIDE as f64 * ds;
    for k in OMEGA_STRIDE..=n - OMEGA_STRIDE {
        let dd = (omega[k + OMEGA_STRIDE] - 2.0 * omega[k] + omega[k - OMEGA_STRIDE])
            / (wide * wide);
        if dd < min_margin {
            min_margin = dd;
            argmin = radii[k];
        }
    }
    let scale = omega.iter().cloned().fold(1.0_f64, f64::max);
    let report = ConvexityReport {
        check: "omega_convexity",
        grid: n,
        min_margin,
        argmin,
        pass: min_margin >= -1e-6 * scale,
    };
    Ok(OmegaProfile {
        s,
        radii,
        omega,
        report,
    })
}

/// The normalizing Möbius transformation of the lifted radial curve
/// c(r) = f̃(r e^{iθ}) at the origin: translate c(0) to 0, rescale to unit
/// speed, rotate the tangent onto e₁ and the normal part of c″ onto e₂,
/// then post-compose with the space extension of z ↦ z/(1 + cz) for
/// c = (1 + α)/2, where α = ⟨c″, t̂⟩/|c′| is the tangential second-order
/// coefficient after rescaling. The transferred factor e^{τ} then has
/// τ(0) = 0 and τ′(0) = α − 2c = −1.
pub fn normalizing_mobius(m: &HarmonicMap, theta: f64) -> Result<SpaceMobius> {
    let origin = Complex64::new(0.0, 0.0);
    let p0 = lift::lift_point(m, origin)?.position();
    let e = Complex64::from_polar(1.0, theta);
    let e2 = e * e;
    let hj = m.h().jet(origin)?;
    let gj = m.g().jet(origin)?;
    let wj = m.integrand_jet(origin)?;
    // d/dr and d²/dr² of (U, V, W)(r e^{iθ}) at r = 0.
    let c1 = [
        (e * (hj.f1 + gj.f1)).re,
        (e * (hj.f1 - gj.f1)).im,
        2.0 * (e * wj.f0).im,
    ];
    let c2 = [
        (e2 * (hj.f2 + gj.f2)).re,
        (e2 * (hj.f2 - gj.f2)).im,
        2.0 * (e2 * wj.f1).im,
    ];
    let v = geom::norm(c1);
    if v <= 1e-300 {
        return Err(Error::ChartError { z: origin });
    }
    let t_hat = geom::scale(1.0 / v, c1);
    let alpha = geom::dot(c2, t_hat) / v;
    let perp = geom::sub(c2, geom::scale(geom::dot(c2, t_hat), t_hat));
    let n_hat = if geom::norm(perp) > 1e-9 * (1.0 + geom::norm(c2)) {
        geom::normalize(perp)
    } else {
        // Straight to second order: complete the frame from the axis least
        // aligned with the tangent.
        let k = (0..3)
            .min_by(|&i, &j| t_hat[i].abs().partial_cmp(&t_hat[j].abs()).unwrap())
            .unwrap();
        let mut axis = [0.0; 3];
        axis[k] = 1.0;
        geom::normalize(geom::sub(axis, geom::scale(t_hat[k], t_hat)))
    };
    let b_hat = geom::cross(t_hat, n_hat);
    let rot = Mat3::from_rows(t_hat, n_hat, b_hat);
    let c = Complex64::new(0.5 * (1.0 + alpha), 0.0);
    Ok(SpaceMobius::identity()
        .translation(geom::scale(-1.0, p0))
        .dilation(1.0 / v)
        .rotation(rot)
        .then(&SpaceMobius::unit_disk_extension(c)))
}

/// Distortion bound e^{σ} ≤ Φ′(|z|)/(aΦ(|z|) + b)² on the annulus
/// r0 ≤ |z| ≤ RADIAL_MARGIN·rmax: finds the largest a (by bisection) for
/// which b(a) = min(u − aΦ) keeps aΦ(r0) + b(a) positive, and returns
/// (a, b, max violation of the bound on the sampling grid). The violation
/// is nonpositive by construction of b; it is reported as a float-level
/// consistency value.
///
/// A lift with identically vanishing curvature is planar; u is then
/// critical along a whole segment and the bound reduces to its closed
/// analytic form, so the critical-point uniqueness probe is skipped. For
/// curved lifts, multi-start descent seeded at the local minima of a
/// 40×40 polar value grid must agree on a single critical cluster.
pub fn distortion_check(
    m: &HarmonicMap,
    metric: &RadialMetric,
    r0: f64,
) -> Result<(f64, f64, f64)> {
    let r_hi = RADIAL_MARGIN * metric.profile().rmax();
    if !(0.0 < r0 && r0 < r_hi) {
        return Err(Error::Param(format!(
            "inner radius r0 = {r0} outside (0, {r_hi:.6})"
        )));
    }
    if !is_planar(m)? {
        let clusters = critical_clusters(m, metric, r_hi)?;
        if clusters > 1 {
            return Err(Error::MultipleCriticalPoints { count: clusters });
        }
    }

    // Sample u, Φ and Φ′ over the annulus once; the bisection reuses them.
    const N_R: usize = 64;
    const N_TH: usize = 48;
    let profile = metric.profile();
    let mut u = Vec::with_capacity(N_R * N_TH);
    let mut phi = Vec::with_capacity(N_R);
    let mut phi1 = Vec::with_capacity(N_R);
    for i in 0..N_R {
        let r = r0 + (r_hi - r0) * i as f64 / (N_R - 1) as f64;
        phi.push(profile.phi(r)?);
        phi1.push(profile.phi1(r)?);
        for j in 0..N_TH {
            let z = Complex64::from_polar(r, TAU * j as f64 / N_TH as f64);
            u.push(u_function(m, metric, z)?);
        }
    }
    let b_of = |a: f64| -> f64 {
        let mut b = f64::INFINITY;
        for i in 0..N_R {
            for j in 0..N_TH {
                b = b.min(u[i * N_TH + j] - a * phi[i]);
            }
        }
        b
    };
    let phi_r0 = profile.phi(r0)?;
    let feasible = |a: f64| a * phi_r0 + b_of(a) > 0.0;
    if !feasible(0.0) {
        // u > 0 everywhere, so a = 0 is always feasible.
        return Err(Error::Search("empty feasible interval for a".into()));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut doublings = 0;
    while feasible(hi) {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::Search("no infeasible slope a found".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = lo;
    let b = b_of(a);
    let mut violation = f64::NEG_INFINITY;
    for i in 0..N_R {
        for j in 0..N_TH {
            let esigma = phi1[i] / (u[i * N_TH + j] * u[i * N_TH + j]);
            let denom = a * phi[i] + b;
            violation = violation.max(esigma - phi1[i] / (denom * denom));
        }
    }
    Ok((a, b, violation))
}

/// A lift is planar iff its curvature term vanishes identically; probe a
/// handful of points.
fn is_planar(m: &HarmonicMap) -> Result<bool> {
    let probes = [
        Complex64::new(0.3, 0.0),
        Complex64::new(-0.2, 0.45),
        Complex64::new(0.1, -0.6),
        Complex64::new(-0.55, -0.1),
        Complex64::new(0.0, 0.25),
    ];
    for &z in &probes {
        if m.curvature_term(z)? > PLANAR_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Count critical-point clusters of u by gradient descent seeded at the
/// local minima of a 40×40 polar value grid (every other cell descends
/// into one of their basins), deduplicated at CLUSTER_RADIUS.
fn critical_clusters(m: &HarmonicMap, metric: &RadialMetric, r_hi: f64) -> Result<usize> {
    const N_R: usize = 40;
    const N_TH: usize = 40;
    let mut vals = vec![0.0_f64; N_R * N_TH];
    let mut pts = vec![Complex64::new(0.0, 0.0); N_R * N_TH];
    for i in 0..N_R {
        let r = r_hi * (i as f64 + 0.5) / N_R as f64;
        for j in 0..N_TH {
            let z = Complex64::from_polar(r, TAU * j as f64 / N_TH as f64);
            vals[i * N_TH + j] = u_function(m, metric, z)?;
            pts[i * N_TH + j] = z;
        }
    }
    let mut seeds = Vec::new();
    for i in 0..N_R {
        for j in 0..N_TH {
            let v = vals[i * N_TH + j];
            let mut local_min = true;
            'scan: for di in -1_i32..=1 {
                let ii = i as i32 + di;
                if ii < 0 || ii >= N_R as i32 {
                    continue;
                }
                for dj in -1_i32..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let jj = (j as i32 + dj).rem_euclid(N_TH as i32);
                    if vals[ii as usize * N_TH + jj as usize] < v {
                        local_min = false;
                        break 'scan;
                    }
                }
            }
            if local_min {
                seeds.push(pts[i * N_TH + j]);
            }
        }
    }
    let mut reps: Vec<Complex64> = Vec::new();
    'dedup: for &seed in &seeds {
        let end = descend(m, metric, seed, r_hi)?;
        for rep in &reps {
            if (end - rep).norm() <= CLUSTER_RADIUS {
                continue 'dedup;
            }
        }
        reps.push(end);
    }
    Ok(reps.len())
}

/// Gradient descent on u with backtracking, clipped to |z| ≤ r_hi.
fn descend(m: &HarmonicMap, metric: &RadialMetric, start: Complex64, r_hi: f64) -> Result<Complex64> {
    let h = 1e-6;
    let clip = |z: Complex64| {
        let r = z.norm();
        if r > r_hi {
            z * (r_hi / r)
        } else {
            z
        }
    };
    let mut z = start;
    let mut val = u_function(m, metric, z)?;
    let mut eta = 0.02;
    for _ in 0..200 {
        let gx = (u_function(m, metric, z + h)? - u_function(m, metric, z - h)?) / (2.0 * h);
        let gy = (u_function(m, metric, z + Complex64::new(0.0, h))?
            - u_function(m, metric, z - Complex64::new(0.0, h))?)
            / (2.0 * h);
        let grad = Complex64::new(gx, gy);
        if grad.norm() <= 1e-8 {
            break;
        }
        let mut moved = false;
        while eta > 1e-13 {
            let cand = clip(z - eta * grad);
            let cval = u_function(m, metric, cand)?;
            if cval < val {
                z = cand;
                val = cval;
                eta = (eta * 1.5).min(0.05);
                moved = true;
                break;
            }
            eta *= 0.4;
        }
        if !moved {
            break;
        }
    }
    Ok(z)
}

/// Fitted modulus-of-continuity class of a lift near the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModulusType {
    /// d shrinks like a power of 1/log(1/δ) only.
    Log,
    /// d ~ δ^e for a genuine exponent e < 1.
    Holder,
    /// Fitted exponent ≥ 0.95.
    Lipschitz,
}

/// Least-squares slope of y against x and the sum of squared residuals.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - my - slope * (xi - mx);
            r * r
        })
        .sum();
    (slope, sse)
}

/// Empirical modulus of continuity of the lift in the chordal metric of
/// R³ ∪ {∞}: d(x, y) = 2|x − y| / √((1+|x|²)(1+|y|²)).
///
/// For each separation δ (12 values log-spaced in [1e-4, 1e-1]) the worst
/// chordal displacement over boundary-adjacent pairs — tangential at
/// radius 1 − δ, radial (1 − 2δ vs 1 − δ), and a radial half-telescope
/// (1 − δ vs 1 − δ/2) — across 8 angles is recorded. A power law d ~ δ^e
/// and a log law d ~ C·log(1/δ)^{−γ} are fitted by least squares in
/// logarithmic coordinates; the law with the smaller residual decides the
/// type, with exponent ≥ 0.95 reported as lipschitz. The exponent is
/// clamped below at 0.05; when the weight's boundary limit λ < 1 it
/// should reach √(1 − λ) − 0.1.
pub fn holder_estimate(m: &HarmonicMap, metric: &RadialMetric) -> Result<(f64, ModulusType)> {
    let (_lambda, _mu) = nehari::lambda_limit(metric.profile().weight())?;
    const N_DELTA: usize = 12;
    const N_ANGLE: usize = 8;
    let mut ln_delta = Vec::new();
    let mut ln_d = Vec::new();
    for jd in 0..N_DELTA {
        let delta = 10.0_f64.powf(-4.0 + 3.0 * jd as f64 / (N_DELTA - 1) as f64);
        let mut dmax: f64 = 0.0;
        for k in 0..N_ANGLE {
            let th = TAU * k as f64 / N_ANGLE as f64;
            let pairs = [
                (
                    Complex64::from_polar(1.0 - delta, th),
                    Complex64::from_polar(1.0 - delta, th + delta / (1.0 - delta)),
                ),
                (
                    Complex64::from_polar(1.0 - 2.0 * delta, th),
                    Complex64::from_polar(1.0 - delta, th),
                ),
                (
                    Complex64::from_polar(1.0 - delta, th),
                    Complex64::from_polar(1.0 - delta / 2.0, th),
                ),
            ];
            for (z1, z2) in pairs {
                if let (Ok(p1), Ok(p2)) = (lift::lift_point(m, z1), lift::lift_point(m, z2)) {
                    dmax = dmax.max(chordal(p1.position(), p2.position()));
                }
            }
        }
        if dmax > 0.0 {
            ln_delta.push(delta.ln());
            ln_d.push(dmax.ln());
        }
    }
    if ln_d.len() < 6 {
        return Err(Error::InsufficientSamples {
            got: ln_d.len(),
            needed: 6,
        });
    }
    let (power_slope, power_sse) = linear_fit(&ln_delta, &ln_d);
    let ln_log: Vec<f64> = ln_delta.iter().map(|&ld| (-ld).ln()).collect();
    let (log_slope, log_sse) = linear_fit(&ln_log, &ln_d);
    let exponent = power_slope.max(0.05);
    let kind = if log_sse < 0.5 * power_sse && log_slope < -0.5 {
        ModulusType::Log
    } else if exponent >= 0.95 {
        ModulusType::Lipschitz
    } else {
        ModulusType::Holder
    };
    Ok((exponent, kind))
}

fn chordal(x: geom::Vec3, y: geom::Vec3) -> f64 {
    2.0 * geom::dist(x, y) / ((1.0 + geom::dot(x, x)) * (1.0 + geom::dot(y, y))).sqrt()
}
