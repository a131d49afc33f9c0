//! Third-order jets of analytic functions: value and first three complex
//! derivatives at a point, with exact propagation rules for arithmetic,
//! composition, and the elementary functions used by the expression grammar.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Value and derivatives (f, f', f'', f''') of an analytic function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub f0: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub f3: Complex64,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl Jet3 {
    pub fn new(f0: Complex64, f1: Complex64, f2: Complex64, f3: Complex64) -> Self {
        Jet3 { f0, f1, f2, f3 }
    }

    /// Jet of the constant function c.
    pub fn constant(c: Complex64) -> Self {
        Jet3::new(c, ZERO, ZERO, ZERO)
    }

    /// Jet of the identity at z.
    pub fn variable(z: Complex64) -> Self {
        Jet3::new(z, ONE, ZERO, ZERO)
    }

    pub fn scale(self, c: Complex64) -> Self {
        Jet3::new(c * self.f0, c * self.f1, c * self.f2, c * self.f3)
    }

    /// Largest entry magnitude; used for scale-aware tolerances.
    pub fn magnitude(&self) -> f64 {
        self.f0
            .norm()
            .max(self.f1.norm())
            .max(self.f2.norm())
            .max(self.f3.norm())
    }

    /// Faa di Bruno to third order: jet of g∘f from the jet of g at f(z)
    /// (`self`) and the jet of f at z (`inner`).
    pub fn compose(self, inner: Jet3) -> Jet3 {
        let g1 = self.f1;
        let g2 = self.f2;
        let g3 = self.f3;
        let (i1, i2, i3) = (inner.f1, inner.f2, inner.f3);
        Jet3::new(
            self.f0,
            g1 * i1,
            g2 * i1 * i1 + g1 * i2,
            g3 * i1 * i1 * i1 + 3.0 * g2 * i1 * i2 + g1 * i3,
        )
    }

    /// Jet of 1/w at w0 = self.f0, composed with self.
    pub fn recip(self) -> Jet3 {
        let r = ONE / self.f0;
        let r2 = r * r;
        Jet3::new(r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2).compose(self)
    }

    /// Jet of exp(f).
    pub fn exp(self) -> Jet3 {
        let e = self.f0.exp();
        Jet3::new(e, e, e, e).compose(self)
    }

    /// Jet of the principal log(f).
    pub fn ln(self) -> Jet3 {
        let w = self.f0;
        let r = ONE / w;
        let r2 = r * r;
        Jet3::new(w.ln(), r, -r2, 2.0 * r2 * r).compose(self)
    }

    /// Jet of the principal power f^alpha (alpha an arbitrary complex
    /// constant). Integer alpha is evaluated by repeated multiplication, so
    /// the result is single-valued across the log cut and finite at f = 0.
    pub fn powc(self, alpha: Complex64) -> Jet3 {
        if alpha.im == 0.0 && alpha.re.fract() == 0.0 && alpha.re.abs() <= 64.0 {
            let n = alpha.re as i64;
            return if n >= 0 {
                self.int_pow(n as u32)
            } else {
                self.int_pow(n.unsigned_abs() as u32).recip()
            };
        }
        let w = self.f0;
        let p0 = w.powc(alpha);
        let d1 = alpha * p0 / w;
        let d2 = (alpha - ONE) * d1 / w;
        let d3 = (alpha - 2.0 * ONE) * d2 / w;
        Jet3::new(p0, d1, d2, d3).compose(self)
    }

    fn int_pow(self, n: u32) -> Jet3 {
        let mut acc = Jet3::constant(ONE);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    /// Classical Schwarzian derivative S f = f'''/f' - (3/2)(f''/f')^2.
    pub fn schwarzian(&self, z: Complex64) -> Result<Complex64> {
        let scale = 1.0 + self.f2.norm() + self.f3.norm();
        if self.f1.norm() <= 1e-14 * scale {
            return Err(Error::CriticalPoint { z });
        }
        let a = self.f2 / self.f1;
        Ok(self.f3 / self.f1 - 1.5 * a * a)
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3::new(self.f0 + o.f0, self.f1 + o.f1, self.f2 + o.f2, self.f3 + o.f3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3::new(self.f0 - o.f0, self.f1 - o.f1, self.f2 - o.f2, self.f3 - o.f3)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3::new(-self.f0, -self.f1, -self.f2, -self.f3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    /// Leibniz to third order.
    fn mul(self, o: Jet3) -> Jet3 {
        Jet3::new(
            self.f0 * o.f0,
            self.f1 * o.f0 + self.f0 * o.f1,
            self.f2 * o.f0 + 2.0 * self.f1 * o.f1 + self.f0 * o.f2,
            self.f3 * o.f0 + 3.0 * self.f2 * o.f1 + 3.0 * self.f1 * o.f2 + self.f0 * o.f3,
        )
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    fn div(self, o: Jet3) -> Jet3 {
        self * o.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64 as C;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn exp_jet_at_origin() {
        // d^k/dz^k exp(pi z) at 0 is pi^k.
        let j = Jet3::variable(c(0.0, 0.0)).scale(c(PI, 0.0)).exp();
        assert_relative_eq!(j.f0.re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(j.f1.re, PI, epsilon = 1e-14);
        assert_relative_eq!(j.f2.re, PI * PI, epsilon = 1e-13);
        assert_relative_eq!(j.f3.re, PI * PI * PI, epsilon = 1e-12);
        assert!(j.f0.im.abs() < 1e-15);
    }

    #[test]
    fn log_ratio_jet_at_origin() {
        // F(z) = (1/2) log((1+z)/(1-z)) has F(0)=0, F'(0)=1, F''(0)=0, F'''(0)=2.
        let z = Jet3::variable(c(0.0, 0.0));
        let one = Jet3::constant(c(1.0, 0.0));
        let f = ((one + z) / (one - z)).ln().scale(c(0.5, 0.0));
        assert!(f.f0.norm() < 1e-15);
        assert_relative_eq!(f.f1.re, 1.0, epsilon = 1e-14);
        assert!(f.f2.norm() < 1e-14);
        assert_relative_eq!(f.f3.re, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn schwarzian_of_strip_map() {
        // S[(1/2) log((1+z)/(1-z))] = 2/(1-z^2)^2.
        for &z0 in &[c(0.3, 0.2), c(-0.5, 0.1), c(0.0, 0.7)] {
            let z = Jet3::variable(z0);
            let one = Jet3::constant(c(1.0, 0.0));
            let f = ((one + z) / (one - z)).ln().scale(c(0.5, 0.0));
            let s = f.schwarzian(z0).unwrap();
            let w = c(1.0, 0.0) - z0 * z0;
            let expect = 2.0 / (w * w);
            assert_relative_eq!(s.re, expect.re, epsilon = 1e-11);
            assert_relative_eq!(s.im, expect.im, epsilon = 1e-11);
        }
    }

    #[test]
    fn schwarzian_rejects_critical_point() {
        // f(z) = z^2 has f'(0) = 0.
        let j = Jet3::variable(c(0.0, 0.0)).powc(c(2.0, 0.0));
        assert!(matches!(
            j.schwarzian(c(0.0, 0.0)),
            Err(Error::CriticalPoint { .. })
        ));
    }

    #[test]
    fn integer_power_is_continuous_across_cut() {
        // (w)^3 for w on the negative real axis must not jump.
        let above = Jet3::variable(c(-1.0, 1e-12)).powc(c(3.0, 0.0));
        let below = Jet3::variable(c(-1.0, -1e-12)).powc(c(3.0, 0.0));
        assert!((above.f0 - below.f0).norm() < 1e-10);
        assert_relative_eq!(above.f0.re, -1.0, epsilon = 1e-10);
    }

    #[test]
    fn division_matches_product_rule() {
        let z0 = c(0.4, -0.3);
        let z = Jet3::variable(z0);
        let one = Jet3::constant(c(1.0, 0.0));
        // 1/(1-z^2) two ways: direct division vs product of geometric factors.
        let a = one / (one - z * z);
        let b = (one / (one - z)) * (one / (one + z));
        assert!((a.f0 - b.f0).norm() < 1e-13);
        assert!((a.f1 - b.f1).norm() < 1e-12);
        assert!((a.f2 - b.f2).norm() < 1e-12);
        assert!((a.f3 - b.f3).norm() < 1e-11);
    }
}
