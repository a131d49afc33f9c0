//! Harmonic mappings f = h + conj(g) with dilatation g′/h′ = q², and the
//! calculus of their conformal factor e^σ = |h′| + |g′|.
//!
//! Everything is computed from closed-form Wirtinger derivatives of
//! σ = log|h′| + log(1 + |q|²), never from finite differences: the criterion
//! is evaluated on dense grids near |z| → 1 where differencing degrades.
//! At zeros of h′ (equivalently poles of q) the roles of h and g swap and q
//! is replaced by 1/q; the swap is decided pointwise by comparing |h′| with
//! |g′|, so only |h′| + |g′| > 0 is ever required.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::AnalyticFn;
use crate::jet::Jet3;
use crate::mobius::DiskMobius;

const AUDIT_POINTS: usize = 100;
const AUDIT_ATTEMPTS: usize = 1000;
const AUDIT_RADIUS: f64 = 0.8;
const AUDIT_TOL: f64 = 1e-9;
const AUDIT_SEED: u64 = 0x5eed_0001;

/// Which derivative carries the chart at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// h′ dominates; formulas use (h, q).
    HPrime,
    /// g′ dominates; formulas use (g, 1/q).
    GPrime,
}

/// The conformal factor and its Wirtinger derivatives at one point.
#[derive(Debug, Clone, Copy)]
pub struct SigmaJet {
    /// σ = log(|h′| + |g′|).
    pub sigma: f64,
    pub sigma_z: Complex64,
    pub sigma_zz: Complex64,
    /// ∂σ/∂y = −2 Im σ_z.
    pub sigma_y: f64,
    pub chart: Chart,
}

impl SigmaJet {
    /// e^σ = |h′| + |g′|.
    pub fn conformal_factor(&self) -> f64 {
        self.sigma.exp()
    }
}

#[derive(Debug, Clone)]
pub struct HarmonicMap {
    h: AnalyticFn,
    g: AnalyticFn,
    q: AnalyticFn,
    q_inv: AnalyticFn,
    z0: Complex64,
}

impl HarmonicMap {
    /// Build a map from its analytic parts, enforcing g′ = q²h′ by a seeded
    /// random audit and normalizing so that g(z0) = 0 (a constant shift of h
    /// and g that leaves f = h + conj(g) unchanged).
    pub fn new(h: AnalyticFn, g: AnalyticFn, q: AnalyticFn, z0: Complex64) -> Result<Self> {
        audit_dilatation(&h, &g, &q)?;
        let shift = g.value(z0)?;
        let (h, g) = if shift.norm() > 0.0 {
            (
                h.add(&AnalyticFn::constant(shift.conj())),
                g.sub(&AnalyticFn::constant(shift)),
            )
        } else {
            (h, g)
        };
        let q_inv = q.recip_symbolic();
        Ok(HarmonicMap { h, g, q, q_inv, z0 })
    }

    pub fn h(&self) -> &AnalyticFn {
        &self.h
    }

    pub fn g(&self) -> &AnalyticFn {
        &self.g
    }

    pub fn q(&self) -> &AnalyticFn {
        &self.q
    }

    pub fn base_point(&self) -> Complex64 {
        self.z0
    }

    /// f(z) = h(z) + conj(g(z)).
    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.h.value(z)? + self.g.value(z)?.conj())
    }

    /// Jets of the chart-carrying pair: (a, w) = (h, q) or (g, 1/q).
    fn chart_jets(&self, z: Complex64) -> Result<(Jet3, Jet3, Chart)> {
        let hj = self.h.jet(z)?;
        let gj = self.g.jet(z)?;
        let scale = 1.0 + hj.f2.norm() + gj.f2.norm();
        if hj.f1.norm().max(gj.f1.norm()) <= 1e-14 * scale {
            return Err(Error::ChartError { z });
        }
        if hj.f1.norm() >= gj.f1.norm() {
            Ok((hj, self.q.jet(z)?, Chart::HPrime))
        } else {
            Ok((gj, self.q_inv.jet(z)?, Chart::GPrime))
        }
    }

    /// σ and its derivatives from the closed forms
    /// σ_z = a″/(2a′) + w̄w′/(1+|w|²), and one more ∂_z for σ_zz.
    pub fn conformal_factor(&self, z: Complex64) -> Result<SigmaJet> {
        let (a, w, chart) = self.chart_jets(z)?;
        let d = 1.0 + w.f0.norm_sqr();
        let wc = w.f0.conj();
        let sigma = a.f1.norm().ln() + w.f0.norm_sqr().ln_1p();
        let sigma_z = a.f2 / (2.0 * a.f1) + wc * w.f1 / d;
        let sigma_zz = a.f3 / (2.0 * a.f1) - a.f2 * a.f2 / (2.0 * a.f1 * a.f1)
            + wc * w.f2 / d
            - wc * wc * w.f1 * w.f1 / (d * d);
        Ok(SigmaJet {
            sigma,
            sigma_z,
            sigma_zz,
            sigma_y: -2.0 * sigma_z.im,
            chart,
        })
    }

    /// Harmonic Schwarzian via the (h, q) expansion
    /// Sf = Sh + (2q̄/(1+|q|²))(q″ − q′h″/h′) − 4(q̄q′/(1+|q|²))².
    pub fn schwarzian(&self, z: Complex64) -> Result<Complex64> {
        let (a, w, _) = self.chart_jets(z)?;
        let sa = a.schwarzian(z)?;
        let d = 1.0 + w.f0.norm_sqr();
        let wc = w.f0.conj();
        let correction = 2.0 * wc / d * (w.f2 - w.f1 * a.f2 / a.f1);
        let square = wc * w.f1 / d;
        Ok(sa + correction - 4.0 * square * square)
    }

    /// Sf = 2(σ_zz − σ_z²); algebraically identical to [`Self::schwarzian`],
    /// kept as an independently coded cross-check surface.
    pub fn schwarzian_via_sigma(&self, z: Complex64) -> Result<Complex64> {
        let s = self.conformal_factor(z)?;
        Ok(2.0 * (s.sigma_zz - s.sigma_z * s.sigma_z))
    }

    /// e^{2σ}|K| = 4|q′|²/(1+|q|²)², the curvature term of the criterion.
    pub fn curvature_term(&self, z: Complex64) -> Result<f64> {
        let (_, w, _) = self.chart_jets(z)?;
        let d = 1.0 + w.f0.norm_sqr();
        Ok(4.0 * w.f1.norm_sqr() / (d * d))
    }

    /// Gauss curvature K = −4|q′|²/(|h′|²(1+|q|²)⁴) ≤ 0 of the lift.
    pub fn gauss_curvature(&self, z: Complex64) -> Result<f64> {
        let s = self.conformal_factor(z)?;
        Ok(-self.curvature_term(z)? * (-2.0 * s.sigma).exp())
    }

    /// Jet (w, w′, w″) of the Weierstrass integrand w = h′q = g′/q; the
    /// third entry of the result is not populated.
    pub fn integrand_jet(&self, z: Complex64) -> Result<Jet3> {
        let (a, w, _) = self.chart_jets(z)?;
        let da = Jet3::new(a.f1, a.f2, a.f3, Complex64::new(0.0, 0.0));
        let wj = Jet3::new(w.f0, w.f1, w.f2, Complex64::new(0.0, 0.0));
        let prod = da * wj;
        Ok(Jet3::new(
            prod.f0,
            prod.f1,
            prod.f2,
            Complex64::new(0.0, 0.0),
        ))
    }

    /// The composite f∘T for a disk automorphism T (general form).
    pub fn precompose(&self, t: &DiskMobius) -> Result<HarmonicMap> {
        let tf = t.as_analytic();
        HarmonicMap::new(
            self.h.compose(&tf),
            self.g.compose(&tf),
            self.q.compose(&tf),
            t.apply_inverse(self.z0),
        )
    }

    /// The composite f∘T for the involution T(z) = (iρ − z)/(1 + iρz).
    pub fn precompose_special(&self, t: &DiskMobius) -> Result<HarmonicMap> {
        let tf = t.special_as_analytic();
        HarmonicMap::new(
            self.h.compose(&tf),
            self.g.compose(&tf),
            self.q.compose(&tf),
            t.special(self.z0),
        )
    }
}

fn audit_dilatation(h: &AnalyticFn, g: &AnalyticFn, q: &AnalyticFn) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(AUDIT_SEED);
    let mut checked = 0usize;
    for _ in 0..AUDIT_ATTEMPTS {
        if checked >= AUDIT_POINTS {
            break;
        }
        let r = AUDIT_RADIUS * rng.gen::<f64>().sqrt();
        let phi = std::f64::consts::TAU * rng.gen::<f64>();
        let z = Complex64::from_polar(r, phi);
        let (Ok(hj), Ok(gj), Ok(qv)) = (h.jet(z), g.jet(z), q.value(z)) else {
            continue;
        };
        let lhs = gj.f1;
        let rhs = qv * qv * hj.f1;
        if (lhs - rhs).norm() > AUDIT_TOL * (1.0 + lhs.norm() + rhs.norm()) {
            return Err(Error::Param(format!(
                "dilatation audit failed at z = {z}: g' = {lhs} but q^2 h' = {rhs}"
            )));
        }
        checked += 1;
    }
    if checked < AUDIT_POINTS / 10 {
        return Err(Error::Param(format!(
            "dilatation audit could only evaluate {checked} sample points"
        )));
    }
    Ok(())
}
