//! Adaptive Gauss-Kronrod quadrature (G7/K15) for complex analytic
//! integrands along straight segments. The 15-point Kronrod estimate is
//! kept, |K15 - G7| serves as the local error, and the interval with the
//! largest error is bisected until the global estimate meets tolerance or
//! the subdivision budget runs out.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for path integrals.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default subdivision budget.
pub const DEFAULT_BUDGET: usize = 1 << 12;

// 15-point Kronrod abscissae on [-1,1] (positive half; symmetric).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// 7-point Gauss weights, matching XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel {
    t0: f64,
    t1: f64,
    value: Complex64,
    error: f64,
}

/// Apply G7/K15 to f on the parameter interval [t0, t1] of the segment.
fn kernel<F>(f: &F, t0: f64, t1: f64) -> Result<Panel>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let c = 0.5 * (t0 + t1);
    let h = 0.5 * (t1 - t0);
    let fc = f(c)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = XGK[j];
        let fa = f(c - h * x)?;
        let fb = f(c + h * x)?;
        kronrod += WGK[j] * (fa + fb);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (fa + fb);
        }
    }
    let value = kronrod * h;
    let error = ((kronrod - gauss) * h).norm();
    Ok(Panel { t0, t1, value, error })
}

/// Integrate f along the straight segment from `a` to `b` with absolute
/// tolerance `tol` and at most `budget` panels.
pub fn integrate_segment<F>(
    f: F,
    a: Complex64,
    b: Complex64,
    tol: f64,
    budget: usize,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let d = b - a;
    let g = |t: f64| -> Result<Complex64> { Ok(f(a + d * t)? * d) };

    let mut panels = vec![kernel(&g, 0.0, 1.0)?];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        if total_err <= tol {
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        if panels.len() >= budget {
            return Err(Error::Quadrature {
                error: total_err,
                tol,
                intervals: panels.len(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("nonempty panel list");
        let Panel { t0, t1, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (t0 + t1);
        if mid <= t0 || mid >= t1 {
            return Err(Error::Quadrature {
                error: total_err,
                tol,
                intervals: panels.len(),
            });
        }
        panels.push(kernel(&g, t0, mid)?);
        panels.push(kernel(&g, mid, t1)?);
    }
}

/// Fixed 7-point Gauss-Legendre rule for smooth real integrands on [a, b].
/// Used where the integrand is known to be analytic and the interval short.
pub fn gauss7<F>(f: F, a: f64, b: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    const X: [f64; 3] = [
        0.405845151377397166906606412076961,
        0.741531185599394439863864773280788,
        0.949107912342758524526189684047851,
    ];
    const W: [f64; 4] = [
        0.417959183673469387755102040816327,
        0.381830050505118944950369775488975,
        0.279705391489276667901467771423780,
        0.129484966168869693270611432679082,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = W[0] * f(c);
    for j in 0..3 {
        s += W[j + 1] * (f(c - h * X[j]) + f(c + h * X[j]));
    }
    s * h
}
