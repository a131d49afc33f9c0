//! Embedded Dormand–Prince 5(4) integration for small real systems.
//!
//! The right-hand side returns a `Result` so that domain failures (poles,
//! singular factors) surface as errors instead of NaN propagation. A failing
//! evaluation inside a trial step is treated like a rejected step — the step
//! is halved and retried — and only reported if the step size underflows,
//! which lets the integrator skirt singularities it merely probed.

use crate::error::{Error, Result};

pub const DEFAULT_RTOL: f64 = 1e-11;
pub const DEFAULT_ATOL: f64 = 1e-13;

#[rustfmt::skip]
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
#[rustfmt::skip]
const B5: [f64; 7] = [
    35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0,
];
/// B5 − B4: weights of the embedded error estimate.
#[rustfmt::skip]
const E: [f64; 7] = [
    71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
    -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0,
];

fn stages<const N: usize>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    x: f64,
    y: &[f64; N],
    h: f64,
) -> Result<[[f64; N]; 7]> {
    let mut k = [[0.0; N]; 7];
    k[0] = f(x, y)?;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..N {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        k[s] = f(x + C[s] * h, &ys)?;
    }
    Ok(k)
}

/// Integrate y′ = f(x, y) from (x0, y0) to x1 > x0 with adaptive steps.
pub fn integrate_to<const N: usize>(
    mut f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    rtol: f64,
    atol: f64,
) -> Result<[f64; N]> {
    let span = x1 - x0;
    if span <= 0.0 {
        return Ok(y0);
    }
    let floor = 1e-14 * span.max(1.0);
    let mut x = x0;
    let mut y = y0;
    let mut h = span / 16.0;
    while x1 - x > floor {
        h = h.min(x1 - x);
        if h < floor {
            return Err(Error::Search(format!("step size underflow at x = {x}")));
        }
        let k = match stages(&mut f, x, &y, h) {
            Ok(k) => k,
            Err(e) => {
                if h * 0.5 < floor {
                    return Err(e);
                }
                h *= 0.5;
                continue;
            }
        };
        let mut ynew = y;
        let mut errnorm = 0.0;
        for i in 0..N {
            let mut dy = 0.0;
            let mut de = 0.0;
            for s in 0..7 {
                dy += B5[s] * k[s][i];
                de += E[s] * k[s][i];
            }
            ynew[i] = y[i] + h * dy;
            let scale = atol + rtol * y[i].abs().max(ynew[i].abs());
            let r = h * de / scale;
            errnorm += r * r;
        }
        errnorm = (errnorm / N as f64).sqrt();
        if !errnorm.is_finite() {
            if h * 0.5 < floor {
                return Err(Error::Search(format!(
                    "error estimate diverged at x = {x}"
                )));
            }
            h *= 0.5;
            continue;
        }
        let fac = (0.9 * errnorm.powf(-0.2)).clamp(0.2, 5.0);
        if errnorm <= 1.0 {
            x += h;
            y = ynew;
            h *= fac;
        } else {
            h *= fac.min(0.9);
        }
    }
    Ok(y)
}

/// `m` equal steps of the fifth-order formula with no error control.
/// Exposed so convergence-order checks can halve a known step size.
pub fn fixed_steps<const N: usize>(
    mut f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    m: usize,
) -> Result<[f64; N]> {
    let h = (x1 - x0) / m as f64;
    let mut x = x0;
    let mut y = y0;
    for _ in 0..m {
        let k = stages(&mut f, x, &y, h)?;
        for i in 0..N {
            let mut dy = 0.0;
            for s in 0..7 {
                dy += B5[s] * k[s][i];
            }
            y[i] += h * dy;
        }
        x += h;
    }
    Ok(y)
}
