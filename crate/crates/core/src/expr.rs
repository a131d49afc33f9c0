//! A small closed grammar of analytic expressions with exact third-order
//! jet propagation: constants, the identity, field operations, composition,
//! exp, principal log, principal powers, and antiderivatives with a chosen
//! base point. Every evaluation checks the domain first; points on a pole
//! or a branch cut are rejected with the offending sub-expression named.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::Jet3;
use crate::quad;

#[derive(Debug)]
pub enum Expr {
    Const(Complex64),
    Var,
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Exp(Arc<Expr>),
    Log(Arc<Expr>),
    /// Principal power with a constant exponent. Integer exponents are
    /// single-valued and skip the branch-cut domain check.
    Pow(Arc<Expr>, Complex64),
    /// outer ∘ inner.
    Compose(Arc<Expr>, Arc<Expr>),
    /// Antiderivative of the integrand from `base`, along the straight
    /// segment base -> z.
    Integral { integrand: Arc<Expr>, base: Complex64 },
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn is_integer_exponent(alpha: Complex64) -> bool {
    alpha.im == 0.0 && alpha.re.fract() == 0.0 && alpha.re.abs() <= 64.0
}

/// Branch-point / branch-cut test for log and non-integer powers: the
/// principal branch excludes the closed negative real axis.
fn on_log_cut(w: Complex64) -> bool {
    w.norm() <= 1e-250 || (w.re <= 0.0 && w.im.abs() <= 1e-14 * w.re.abs().max(1.0))
}

fn singular_division(num: f64, den: f64) -> bool {
    den <= 1e-14 * (1.0 + num)
}

impl Expr {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var => Ok(z),
            Expr::Add(a, b) => Ok(a.value(z)? + b.value(z)?),
            Expr::Sub(a, b) => Ok(a.value(z)? - b.value(z)?),
            Expr::Mul(a, b) => Ok(a.value(z)? * b.value(z)?),
            Expr::Div(a, b) => {
                let (va, vb) = (a.value(z)?, b.value(z)?);
                if singular_division(va.norm(), vb.norm()) {
                    return Err(self.domain_error(z));
                }
                Ok(va / vb)
            }
            Expr::Neg(a) => Ok(-a.value(z)?),
            Expr::Exp(a) => Ok(a.value(z)?.exp()),
            Expr::Log(a) => {
                let w = a.value(z)?;
                if on_log_cut(w) {
                    return Err(self.domain_error(z));
                }
                Ok(w.ln())
            }
            Expr::Pow(a, alpha) => {
                let w = a.value(z)?;
                if is_integer_exponent(*alpha) {
                    let n = alpha.re as i32;
                    if n < 0 && singular_division(1.0, w.norm()) {
                        return Err(self.domain_error(z));
                    }
                    Ok(w.powi(n))
                } else {
                    if on_log_cut(w) {
                        return Err(self.domain_error(z));
                    }
                    Ok(w.powc(*alpha))
                }
            }
            Expr::Compose(outer, inner) => outer.value(inner.value(z)?),
            Expr::Integral { integrand, base } => quad::integrate_segment(
                |w| integrand.value(w),
                *base,
                z,
                quad::DEFAULT_TOL,
                quad::DEFAULT_BUDGET,
            ),
        }
    }

    fn jet(&self, z: Complex64) -> Result<Jet3> {
        match self {
            Expr::Const(c) => Ok(Jet3::constant(*c)),
            Expr::Var => Ok(Jet3::variable(z)),
            Expr::Add(a, b) => Ok(a.jet(z)? + b.jet(z)?),
            Expr::Sub(a, b) => Ok(a.jet(z)? - b.jet(z)?),
            Expr::Mul(a, b) => Ok(a.jet(z)? * b.jet(z)?),
            Expr::Div(a, b) => {
                let (ja, jb) = (a.jet(z)?, b.jet(z)?);
                if singular_division(ja.f0.norm(), jb.f0.norm()) {
                    return Err(self.domain_error(z));
                }
                Ok(ja / jb)
            }
            Expr::Neg(a) => Ok(-a.jet(z)?),
            Expr::Exp(a) => Ok(a.jet(z)?.exp()),
            Expr::Log(a) => {
                let ja = a.jet(z)?;
                if on_log_cut(ja.f0) {
                    return Err(self.domain_error(z));
                }
                Ok(ja.ln())
            }
            Expr::Pow(a, alpha) => {
                let ja = a.jet(z)?;
                let w = ja.f0;
                if is_integer_exponent(*alpha) {
                    if alpha.re < 0.0 && singular_division(1.0, w.norm()) {
                        return Err(self.domain_error(z));
                    }
                    // Derivatives through powc's rule need w != 0 even for
                    // small positive integer exponents; those jets are
                    // polynomial, so fall back to products there.
                    if w.norm() <= 1e-250 && alpha.re >= 0.0 {
                        return Ok(int_pow_jet(ja, alpha.re as u32));
                    }
                    Ok(ja.powc(*alpha))
                } else {
                    if on_log_cut(w) {
                        return Err(self.domain_error(z));
                    }
                    Ok(ja.powc(*alpha))
                }
            }
            Expr::Compose(outer, inner) => {
                let ji = inner.jet(z)?;
                let jo = outer.jet(ji.f0)?;
                Ok(jo.compose(ji))
            }
            Expr::Integral { integrand, base } => {
                let jf = integrand.jet(z)?;
                let v = quad::integrate_segment(
                    |w| integrand.value(w),
                    *base,
                    z,
                    quad::DEFAULT_TOL,
                    quad::DEFAULT_BUDGET,
                )?;
                Ok(Jet3::new(v, jf.f0, jf.f1, jf.f2))
            }
        }
    }

    fn domain_error(&self, z: Complex64) -> Error {
        Error::Domain {
            expr: render(self, "z"),
            z,
        }
    }
}

fn int_pow_jet(j: Jet3, n: u32) -> Jet3 {
    let mut acc = Jet3::constant(ONE);
    for _ in 0..n {
        acc = acc * j;
    }
    acc
}

/// An analytic function represented as a shared expression tree.
#[derive(Clone, Debug)]
pub struct AnalyticFn {
    expr: Arc<Expr>,
}

impl AnalyticFn {
    fn wrap(expr: Expr) -> Self {
        AnalyticFn { expr: Arc::new(expr) }
    }

    pub fn from_arc(expr: Arc<Expr>) -> Self {
        AnalyticFn { expr }
    }

    pub fn var() -> Self {
        Self::wrap(Expr::Var)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::wrap(Expr::Const(c))
    }

    pub fn real(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    pub fn i() -> Self {
        Self::constant(Complex64::new(0.0, 1.0))
    }

    pub fn add(&self, o: &AnalyticFn) -> Self {
        Self::wrap(Expr::Add(self.expr.clone(), o.expr.clone()))
    }

    pub fn sub(&self, o: &AnalyticFn) -> Self {
        Self::wrap(Expr::Sub(self.expr.clone(), o.expr.clone()))
    }

    pub fn mul(&self, o: &AnalyticFn) -> Self {
        Self::wrap(Expr::Mul(self.expr.clone(), o.expr.clone()))
    }

    pub fn div(&self, o: &AnalyticFn) -> Self {
        Self::wrap(Expr::Div(self.expr.clone(), o.expr.clone()))
    }

    pub fn neg(&self) -> Self {
        Self::wrap(Expr::Neg(self.expr.clone()))
    }

    pub fn exp(&self) -> Self {
        Self::wrap(Expr::Exp(self.expr.clone()))
    }

    pub fn log(&self) -> Self {
        Self::wrap(Expr::Log(self.expr.clone()))
    }

    pub fn pow(&self, alpha: Complex64) -> Self {
        Self::wrap(Expr::Pow(self.expr.clone(), alpha))
    }

    pub fn powf(&self, alpha: f64) -> Self {
        self.pow(Complex64::new(alpha, 0.0))
    }

    /// self ∘ inner.
    pub fn compose(&self, inner: &AnalyticFn) -> Self {
        Self::wrap(Expr::Compose(self.expr.clone(), inner.expr.clone()))
    }

    /// Antiderivative of self from `base` along straight segments.
    pub fn integral(&self, base: Complex64) -> Self {
        Self::wrap(Expr::Integral {
            integrand: self.expr.clone(),
            base,
        })
    }

    /// Scale by a real constant.
    pub fn scale(&self, c: f64) -> Self {
        Self::real(c).mul(self)
    }

    /// 1/self, simplified structurally where the shape permits so that the
    /// reciprocal stays evaluable at zeros of `self` that come from an
    /// explicit denominator (used for the swapped chart at poles of the
    /// dilatation root).
    pub fn recip_symbolic(&self) -> Self {
        match &*self.expr {
            Expr::Div(a, b) => Self::wrap(Expr::Div(b.clone(), a.clone())),
            Expr::Exp(a) => Self::wrap(Expr::Exp(Arc::new(Expr::Neg(a.clone())))),
            Expr::Pow(a, alpha) => Self::wrap(Expr::Pow(a.clone(), -*alpha)),
            Expr::Const(c) => Self::constant(ONE / c),
            Expr::Neg(a) => Self::wrap(Expr::Neg(Arc::new(Expr::Div(
                Arc::new(Expr::Const(ONE)),
                a.clone(),
            )))),
            Expr::Mul(a, b) => Self::wrap(Expr::Mul(
                Arc::new(Expr::Div(Arc::new(Expr::Const(ONE)), a.clone())),
                Arc::new(Expr::Div(Arc::new(Expr::Const(ONE)), b.clone())),
            )),
            _ => Self::one().div(self),
        }
    }

    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        self.expr.value(z)
    }

    pub fn jet(&self, z: Complex64) -> Result<Jet3> {
        self.expr.jet(z)
    }

    /// Domain predicate: true when every sub-expression is regular at z.
    pub fn contains(&self, z: Complex64) -> bool {
        self.expr.value(z).is_ok()
    }

    /// Classical Schwarzian derivative at z.
    pub fn schwarzian(&self, z: Complex64) -> Result<Complex64> {
        self.expr.jet(z)?.schwarzian(z)
    }
}

impl fmt::Display for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.expr, "z"))
    }
}

fn fmt_f64(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{}", x)
    }
}

fn fmt_const(c: Complex64) -> String {
    if c.im == 0.0 {
        if c.re < 0.0 {
            format!("({})", fmt_f64(c.re))
        } else {
            fmt_f64(c.re)
        }
    } else if c.re == 0.0 {
        if c.im == 1.0 {
            "i".to_string()
        } else if c.im == -1.0 {
            "(-i)".to_string()
        } else {
            // Parenthesized so the rendering stays a single factor.
            format!("({}*i)", fmt_f64(c.im))
        }
    } else if c.im < 0.0 {
        format!("({}-{}*i)", fmt_f64(c.re), fmt_f64(-c.im))
    } else {
        format!("({}+{}*i)", fmt_f64(c.re), fmt_f64(c.im))
    }
}

// Precedence levels: additive 1, multiplicative 2, unary 3, power 4, atom 5.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        // Constants render self-delimiting (negatives and complex values are
        // parenthesized by fmt_const), so they count as atoms.
        _ => 5,
    }
}

/// Render with the variable spelled as `var`, parenthesizing by precedence.
/// Compositions render as textual substitution, so output always re-parses.
pub fn render(e: &Expr, var: &str) -> String {
    let sub = |child: &Expr, min: u8| -> String {
        let s = render(child, var);
        if prec(child) < min {
            format!("({})", s)
        } else {
            s
        }
    };
    match e {
        Expr::Const(c) => fmt_const(*c),
        Expr::Var => var.to_string(),
        Expr::Add(a, b) => format!("{}+{}", sub(a, 1), sub(b, 2)),
        Expr::Sub(a, b) => format!("{}-{}", sub(a, 1), sub(b, 2)),
        Expr::Mul(a, b) => format!("{}*{}", sub(a, 2), sub(b, 3)),
        Expr::Div(a, b) => format!("{}/{}", sub(a, 2), sub(b, 5)),
        Expr::Neg(a) => format!("-{}", sub(a, 3)),
        Expr::Exp(a) => format!("exp({})", render(a, var)),
        Expr::Log(a) => format!("log({})", render(a, var)),
        Expr::Pow(a, alpha) => format!("{}^{}", sub(a, 5), fmt_const(*alpha)),
        Expr::Compose(outer, inner) => {
            let inner_s = format!("({})", render(inner, var));
            render(outer, &inner_s)
        }
        Expr::Integral { integrand, base } => {
            if base.norm() == 0.0 {
                format!("int({})", render(integrand, var))
            } else {
                format!("int({}, {})", render(integrand, var), fmt_const(*base))
            }
        }
    }
}
