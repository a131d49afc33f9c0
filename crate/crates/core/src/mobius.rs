//! Automorphisms of the unit disk.
//!
//! Two parametrized forms share the (rho, theta) data:
//!
//! * `apply`: z ↦ e^{iθ}(z + iρ)/(1 − iρz), the general automorphism used to
//!   carry the real diameter onto a prescribed hyperbolic geodesic (identity
//!   at ρ = θ = 0).
//! * `special`: z ↦ (iρ − z)/(1 + iρz), the self-inverse map that preserves
//!   the imaginary axis and pushes real points outward: |T(x)| ≥ |x|.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::AnalyticFn;
use crate::jet::Jet3;

const DEGENERATE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskMobius {
    pub rho: f64,
    pub theta: f64,
}

impl DiskMobius {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !(rho.abs() < 1.0) {
            return Err(Error::Param(format!("rho must lie in (-1,1), got {rho}")));
        }
        Ok(DiskMobius { rho, theta })
    }

    pub fn identity() -> Self {
        DiskMobius {
            rho: 0.0,
            theta: 0.0,
        }
    }

    fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        let irho = Complex64::new(0.0, self.rho);
        self.phase() * (z + irho) / (Complex64::new(1.0, 0.0) - irho * z)
    }

    pub fn apply_inverse(&self, w: Complex64) -> Complex64 {
        let irho = Complex64::new(0.0, self.rho);
        let u = w / self.phase();
        (u - irho) / (Complex64::new(1.0, 0.0) + irho * u)
    }

    /// Value and first three derivatives of `apply` in closed form.
    pub fn jet(&self, z: Complex64) -> Jet3 {
        let irho = Complex64::new(0.0, self.rho);
        let den = Complex64::new(1.0, 0.0) - irho * z;
        let lead = self.phase() * (1.0 - self.rho * self.rho);
        Jet3 {
            f0: self.apply(z),
            f1: lead / (den * den),
            f2: lead * 2.0 * irho / (den * den * den),
            f3: lead * 6.0 * irho * irho / (den * den * den * den),
        }
    }

    /// The involution T(z) = (iρ − z)/(1 + iρz); ignores theta.
    pub fn special(&self, z: Complex64) -> Complex64 {
        let irho = Complex64::new(0.0, self.rho);
        (irho - z) / (Complex64::new(1.0, 0.0) + irho * z)
    }

    pub fn special_jet(&self, z: Complex64) -> Jet3 {
        let irho = Complex64::new(0.0, self.rho);
        let den = Complex64::new(1.0, 0.0) + irho * z;
        let lead = -(1.0 - self.rho * self.rho);
        Jet3 {
            f0: self.special(z),
            f1: lead / (den * den),
            f2: lead * (-2.0) * irho / (den * den * den),
            f3: lead * 6.0 * irho * irho / (den * den * den * den),
        }
    }

    pub fn as_analytic(&self) -> AnalyticFn {
        let z = AnalyticFn::var();
        let irho = AnalyticFn::constant(Complex64::new(0.0, self.rho));
        let num = z.add(&irho);
        let den = AnalyticFn::one().sub(&irho.mul(&z));
        AnalyticFn::constant(self.phase()).mul(&num.div(&den))
    }

    pub fn special_as_analytic(&self) -> AnalyticFn {
        let z = AnalyticFn::var();
        let irho = AnalyticFn::constant(Complex64::new(0.0, self.rho));
        let num = irho.sub(&z);
        let den = AnalyticFn::one().add(&irho.mul(&z));
        num.div(&den)
    }
}

/// The automorphism carrying two real points x1, x2 onto z1, z2 along the
/// hyperbolic geodesic through them, plus those preimages.
pub fn geodesic_through(z1: Complex64, z2: Complex64) -> Result<(DiskMobius, f64, f64)> {
    if z1.norm() >= 1.0 || z2.norm() >= 1.0 {
        return Err(Error::Param(format!(
            "geodesic endpoints must lie in the open disk: |z1| = {}, |z2| = {}",
            z1.norm(),
            z2.norm()
        )));
    }
    if (z1 - z2).norm() < DEGENERATE_TOL {
        return Err(Error::DegenerateInput {
            z1,
            z2,
            tol: DEGENERATE_TOL,
        });
    }

    let cross = (z1.conj() * z2).im;
    let t = if cross.abs() <= 1e-14 * (1.0 + z1.norm() * z2.norm()) {
        // z1, z2, 0 collinear: the geodesic is a diameter. Its direction is
        // only defined mod pi; take the representative in (-pi/2, pi/2].
        let pivot = if z1.norm() >= z2.norm() { z1 } else { z2 };
        let mut theta = pivot.arg();
        if theta > std::f64::consts::FRAC_PI_2 {
            theta -= std::f64::consts::PI;
        } else if theta <= -std::f64::consts::FRAC_PI_2 {
            theta += std::f64::consts::PI;
        }
        DiskMobius { rho: 0.0, theta }
    } else {
        // Center of the circle through z1, z2 orthogonal to the unit circle:
        // 2 Re(conj(z_j) w) = |z_j|^2 + 1.
        let det = 4.0 * cross;
        let (b1, b2) = (z1.norm_sqr() + 1.0, z2.norm_sqr() + 1.0);
        let wx = 2.0 * (b1 * z2.im - b2 * z1.im) / det;
        let wy = 2.0 * (z1.re * b2 - z2.re * b1) / det;
        let center = Complex64::new(wx, wy);
        let radius = (center.norm_sqr() - 1.0).sqrt();
        // Point of the geodesic closest to the origin.
        let nearest = center * (1.0 - radius / center.norm());
        DiskMobius {
            rho: nearest.norm(),
            theta: nearest.arg() - std::f64::consts::FRAC_PI_2,
        }
    };

    let (p1, p2) = (t.apply_inverse(z1), t.apply_inverse(z2));
    for (x, z) in [(p1, z1), (p2, z2)] {
        let back = t.apply(Complex64::new(x.re, 0.0));
        if (back - z).norm() > 1e-12 * (1.0 + z.norm()) {
            return Err(Error::Search(format!(
                "geodesic chart failed to verify: T({}) = {} vs {}",
                x.re, back, z
            )));
        }
    }
    Ok((t, p1.re, p2.re))
}
