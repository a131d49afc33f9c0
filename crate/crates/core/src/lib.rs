//! Numerical machinery for the Schwarzian univalence criterion on
//! Weierstrass–Enneper lifts of planar harmonic mappings.
//!
//! A harmonic mapping f = h + conj(g) with dilatation g′/h′ = q² lifts to a
//! minimal surface with conformal factor e^σ = |h′| + |g′|. The criterion
//! checked throughout is
//!
//! ```text
//! |Sf(z)| + e^{2σ(z)} |K(z)| ≤ 2 p(|z|)
//! ```
//!
//! for a Nehari weight p, where Sf = 2(σ_zz − σ_z²) is the harmonic
//! Schwarzian and K the Gauss curvature of the lift.
//!
//! Module tour: [`jet`] and [`expr`] provide exact third-order jets of
//! analytic expressions; [`harmonic`] the σ-calculus; [`lift`] curves and
//! Ahlfors' S1; [`nehari`] the extremal ODE profiles; [`metric`] the radial
//! extremal metric and its convexity machinery; [`verify`] criterion grids
//! and injectivity scans; [`catalogue`] the built-in example families.

pub mod catalogue;
pub mod error;
pub mod expr;
pub mod fd;
pub mod geom;
pub mod harmonic;
pub mod interp;
pub mod jet;
pub mod lift;
pub mod mesh;
pub mod metric;
pub mod mobius;
pub mod nehari;
pub mod ode;
pub mod parse;
pub mod quad;
pub mod space_mobius;
pub mod verify;

pub use catalogue::{make_example, ExampleFamily, ExampleMap};
pub use error::{Error, Result};
pub use expr::AnalyticFn;
pub use harmonic::{Chart, HarmonicMap, SigmaJet};
pub use jet::Jet3;
pub use lift::{LiftedCurve, SurfacePoint};
pub use mesh::{lift_mesh, Mesh, MeshVertex};
pub use metric::{
    ConvexityReport, ModulusType, OmegaProfile, RadialMetric, ScalarJet, TracelessTensor,
};
pub use mobius::DiskMobius;
pub use nehari::{
    solve_extremal, DisconjugacyReport, ExtremalProfile, NehariFunction, DEFAULT_RMAX,
};
pub use space_mobius::SpaceMobius;
pub use verify::{
    check_criterion, criterion_margin, univalence_scan, CollisionReport, CriterionGrid,
    CriterionReport, CutPointReport, TransferReport,
};
