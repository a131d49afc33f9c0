//! Crate-wide error type. Every numerical operation that can fail returns
//! `Result<T>`; errors carry enough context to report the offending point.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A sub-expression is singular at the requested point (pole, log/power
    /// branch cut, or the base point of an integral path crossing one).
    #[error("expression `{expr}` is singular at z = {z}")]
    Domain { expr: String, z: Complex64 },

    /// Schwarzian of a jet whose first derivative vanishes.
    #[error("first derivative vanishes at z = {z}; Schwarzian undefined")]
    CriticalPoint { z: Complex64 },

    /// Two input points coincide (within tolerance) where distinct points
    /// are required.
    #[error("degenerate input: points {z1} and {z2} coincide within {tol}")]
    DegenerateInput {
        z1: Complex64,
        z2: Complex64,
        tol: f64,
    },

    /// |h'| and |g'| both vanish: the conformal factor is zero and no chart
    /// is available.
    #[error("both h' and g' vanish at z = {z}; conformal factor undefined")]
    ChartError { z: Complex64 },

    /// Adaptive quadrature failed to reach the requested tolerance within
    /// its subdivision budget.
    #[error("quadrature did not converge: error {error:.3e} > tol {tol:.3e} after {intervals} intervals")]
    Quadrature {
        error: f64,
        tol: f64,
        intervals: usize,
    },

    /// Integration path leaves the integrand's domain and no detour helped.
    #[error("integration path from {from} to {to} crosses a singularity")]
    Path { from: Complex64, to: Complex64 },

    /// Index too close to the ends of a sampled curve for the requested
    /// finite-difference stencil.
    #[error("index {index} lacks the {needed} interior neighbors required (curve has {len} samples)")]
    BoundaryIndex {
        index: usize,
        len: usize,
        needed: usize,
    },

    /// kappa^2 - kappa_i^2 came out significantly negative.
    #[error("normal curvature variance negative: {value:.3e}")]
    NegativeVariance { value: f64 },

    /// Inversion applied at (numerically) its pole.
    #[error("inversion pole: |x| = {norm:.3e} at {x:?}")]
    InversionPole { x: [f64; 3], norm: f64 },

    /// The extremal ODE solution u0 crossed zero before the requested
    /// radius: p is not disconjugate there.
    #[error("u0 vanishes at x = {crossing:.6}; p is not disconjugate on the requested interval")]
    Disconjugacy { crossing: f64 },

    /// A boundary limit did not settle to the requested agreement.
    #[error("limit did not converge: successive estimates differ by {spread:.3e}")]
    NonconvergentLimit { spread: f64 },

    /// Radius outside the range covered by a computed profile.
    #[error("r = {r} outside profile range [0, {rmax}]")]
    OutOfRange { r: f64, rmax: f64 },

    /// More than one critical-point cluster found where a unique one is
    /// required (planar / analytic case).
    #[error("{count} critical-point clusters found where a unique one is required")]
    MultipleCriticalPoints { count: usize },

    /// A fit or estimate received fewer usable samples than it needs.
    #[error("only {got} usable samples where {needed} are required")]
    InsufficientSamples { got: usize, needed: usize },

    /// An operation was asked of a map it does not apply to.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Invalid construction parameter.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// Expression text failed to parse.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A root/fit/search routine failed to converge.
    #[error("search failed: {0}")]
    Search(String),
}
