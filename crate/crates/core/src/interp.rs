//! Shape-preserving cubic Hermite interpolation.
//!
//! Node slopes come from local cubic fits (third/fourth order where four
//! neighbors exist) and are then limited to the Fritsch–Carlson
//! monotonicity box |d| ≤ 3·min|Δ|, with d = 0 at local extrema of the
//! data. Monotone data therefore yields a monotone interpolant, while in
//! smooth monotone stretches the limiter stays inactive and the full
//! accuracy of the fitted slopes survives — plain harmonic-mean slopes
//! degrade to first order wherever consecutive secants differ by an O(1)
//! factor, e.g. near the flat top of an even function, and that bias is
//! what the extremal-profile consumers cannot afford.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    /// Nodes must be strictly increasing and at least two.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Param(format!(
                "interpolation needs matching node/value lists of length >= 2, got {}/{}",
                x.len(),
                y.len()
            )));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Param("interpolation nodes must increase".into()));
        }
        let n = x.len();
        let delta: Vec<f64> = (0..n - 1)
            .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
            .collect();
        let mut d: Vec<f64> = (0..n).map(|i| raw_slope(&x, &y, i)).collect();
        for i in 0..n {
            let left = if i > 0 { Some(delta[i - 1]) } else { None };
            let right = if i < n - 1 { Some(delta[i]) } else { None };
            d[i] = limit_slope(d[i], left, right);
        }
        Ok(Pchip { x, y, d })
    }

    /// Evaluate at t; beyond the node range the end cubic is continued
    /// linearly.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0] + self.d[0] * (t - self.x[0]);
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1] + self.d[n - 1] * (t - self.x[n - 1]);
        }
        let i = self.x.partition_point(|&xi| xi <= t) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        self.y[i] * (2.0 * s3 - 3.0 * s2 + 1.0)
            + h * self.d[i] * (s3 - 2.0 * s2 + s)
            + self.y[i + 1] * (-2.0 * s3 + 3.0 * s2)
            + h * self.d[i + 1] * (s3 - s2)
    }
}

/// Derivative at x[i] of local polynomial fits: the two cubics through the
/// four nodes on either side of i are averaged where both exist.
fn raw_slope(x: &[f64], y: &[f64], i: usize) -> f64 {
    let n = x.len();
    if n == 2 {
        return (y[1] - y[0]) / (x[1] - x[0]);
    }
    if n == 3 {
        return poly_derivative(&x[0..3], &y[0..3], x[i]);
    }
    if i >= 2 && i + 2 < n {
        // Interior: average the two cubics that straddle node i.
        let a = poly_derivative(&x[i - 2..i + 2], &y[i - 2..i + 2], x[i]);
        let b = poly_derivative(&x[i - 1..i + 3], &y[i - 1..i + 3], x[i]);
        0.5 * (a + b)
    } else {
        let start = if i < 2 { 0 } else { n - 4 };
        poly_derivative(&x[start..start + 4], &y[start..start + 4], x[i])
    }
}

/// Derivative at t of the Newton-form polynomial through the given nodes.
fn poly_derivative(xs: &[f64], ys: &[f64], t: f64) -> f64 {
    let m = xs.len();
    let mut dd: Vec<f64> = ys.to_vec();
    let mut coeff = Vec::with_capacity(m);
    coeff.push(dd[0]);
    for order in 1..m {
        for j in 0..m - order {
            dd[j] = (dd[j + 1] - dd[j]) / (xs[j + order] - xs[j]);
        }
        coeff.push(dd[0]);
    }
    // p(x) = sum coeff[k] prod_{j<k}(x - xs[j]); differentiate term by term.
    let mut deriv = 0.0;
    for (k, &c) in coeff.iter().enumerate().skip(1) {
        let mut term = 0.0;
        for skip in 0..k {
            let mut prod = 1.0;
            for (j, &xj) in xs.iter().enumerate().take(k) {
                if j != skip {
                    prod *= t - xj;
                }
            }
            term += prod;
        }
        deriv += c * term;
    }
    deriv
}

/// Clamp a slope to the monotonicity box of the adjacent secants.
fn limit_slope(d: f64, left: Option<f64>, right: Option<f64>) -> f64 {
    match (left, right) {
        (Some(a), Some(b)) => {
            if a * b <= 0.0 {
                0.0
            } else {
                let s = b.signum();
                if d * s <= 0.0 {
                    0.0
                } else {
                    s * d.abs().min(3.0 * a.abs().min(b.abs()))
                }
            }
        }
        (Some(a), None) | (None, Some(a)) => {
            if d * a <= 0.0 {
                0.0
            } else {
                a.signum() * d.abs().min(3.0 * a.abs())
            }
        }
        (None, None) => d,
    }
}
