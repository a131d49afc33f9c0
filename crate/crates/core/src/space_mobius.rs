//! Möbius transformations of R³ ∪ {∞}, stored as ordered chains of the
//! elementary conformal maps that generate the group: rotations (more
//! generally, orthogonal maps), translations, positive dilations, and the
//! unit-sphere inversion x ↦ x/|x|².
//!
//! Each step is conformal, so the derivative at any regular point factors as
//! λ·Q with λ > 0 and Q orthogonal. [`SpaceMobius::apply_frame`] returns the
//! image point together with the accumulated λ and Q; λ alone is the
//! conformal factor |dT| that rescales metric quantities, and Q transports
//! unit tangents and normals.
//!
//! [`SpaceMobius::unit_disk_extension`] builds the chain whose restriction to
//! the horizontal coordinate plane (x₁ + ix₂, 0) is the planar Möbius map
//! z ↦ z/(1 + cz).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::{self, Mat3, Vec3};

/// |x| at or below this at an inversion step counts as the pole.
const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Step {
    /// Orthogonal map (the caller's contract; not re-checked).
    Rotation(Mat3),
    Translation(Vec3),
    /// Scale by a positive factor.
    Dilation(f64),
    /// x ↦ x/|x|².
    Inversion,
}

/// A Möbius transformation of R³ as the list of elementary steps composing
/// it; the first entry is applied first.
#[derive(Debug, Clone)]
pub struct SpaceMobius {
    steps: Vec<Step>,
}

impl SpaceMobius {
    pub fn identity() -> Self {
        SpaceMobius { steps: Vec::new() }
    }

    /// Append an orthogonal map (applied after the steps already present).
    pub fn rotation(mut self, r: Mat3) -> Self {
        self.steps.push(Step::Rotation(r));
        self
    }

    pub fn translation(mut self, t: Vec3) -> Self {
        self.steps.push(Step::Translation(t));
        self
    }

    pub fn dilation(mut self, lambda: f64) -> Self {
        assert!(
            lambda > 0.0 && lambda.is_finite(),
            "dilation factor must be positive and finite"
        );
        self.steps.push(Step::Dilation(lambda));
        self
    }

    pub fn inversion(mut self) -> Self {
        self.steps.push(Step::Inversion);
        self
    }

    pub fn apply(&self, x: Vec3) -> Result<Vec3> {
        self.apply_frame(x).map(|(y, _, _)| y)
    }

    /// Conformal factor |dT| at x.
    pub fn conformal_factor(&self, x: Vec3) -> Result<f64> {
        self.apply_frame(x).map(|(_, lambda, _)| lambda)
    }

    /// Image point, conformal factor λ, and orthogonal part Q of the
    /// derivative dT(x) = λ·Q.
    pub fn apply_frame(&self, x: Vec3) -> Result<(Vec3, f64, Mat3)> {
        let mut y = x;
        let mut lambda = 1.0;
        let mut q = Mat3::identity();
        for step in &self.steps {
            match step {
                Step::Rotation(r) => {
                    y = r.apply(y);
                    q = r.mul(&q);
                }
                Step::Translation(t) => {
                    y = geom::add(y, *t);
                }
                Step::Dilation(s) => {
                    y = geom::scale(*s, y);
                    lambda *= s;
                }
                Step::Inversion => {
                    let n2 = geom::dot(y, y);
                    if n2.sqrt() <= POLE_TOL {
                        return Err(Error::InversionPole {
                            x: y,
                            norm: n2.sqrt(),
                        });
                    }
                    // d(x/|x|²) = (I − 2x̂x̂ᵀ)/|x|²: Householder part ⊗ 1/|x|².
                    let u = geom::scale(1.0 / n2.sqrt(), y);
                    let house = Mat3::from_rows(
                        [1.0 - 2.0 * u[0] * u[0], -2.0 * u[0] * u[1], -2.0 * u[0] * u[2]],
                        [-2.0 * u[1] * u[0], 1.0 - 2.0 * u[1] * u[1], -2.0 * u[1] * u[2]],
                        [-2.0 * u[2] * u[0], -2.0 * u[2] * u[1], 1.0 - 2.0 * u[2] * u[2]],
                    );
                    y = geom::scale(1.0 / n2, y);
                    lambda /= n2;
                    q = house.mul(&q);
                }
            }
        }
        Ok((y, lambda, q))
    }

    /// The inverse transformation: steps reversed, each one inverted.
    pub fn inverse(&self) -> SpaceMobius {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|step| match step {
                Step::Rotation(r) => Step::Rotation(r.transpose()),
                Step::Translation(t) => Step::Translation(geom::scale(-1.0, *t)),
                Step::Dilation(s) => Step::Dilation(1.0 / s),
                Step::Inversion => Step::Inversion,
            })
            .collect();
        SpaceMobius { steps }
    }

    /// Composition: apply `self` first, then `next`.
    pub fn then(mut self, next: &SpaceMobius) -> SpaceMobius {
        self.steps.extend(next.steps.iter().cloned());
        self
    }

    /// The Möbius map of R³ restricting on the horizontal plane to
    /// z ↦ z/(1 + cz).
    ///
    /// With w = cz the planar map factors as w/(1 + w) = 1 − 1/(1 + w),
    /// and −1/ζ is realized on the plane by the sphere inversion (which
    /// gives 1/ζ̄) followed by the half-turn diag(−1, 1, −1) (whose planar
    /// action is ζ ↦ −ζ̄).
    pub fn unit_disk_extension(c: Complex64) -> SpaceMobius {
        if c.norm() == 0.0 {
            return SpaceMobius::identity();
        }
        let (r, th) = (c.norm(), c.arg());
        SpaceMobius::identity()
            .rotation(Mat3::rotation_about_w(th))
            .dilation(r)
            .translation([1.0, 0.0, 0.0])
            .inversion()
            .rotation(Mat3::diagonal([-1.0, 1.0, -1.0]))
            .translation([1.0, 0.0, 0.0])
            .rotation(Mat3::rotation_about_w(-th))
            .dilation(1.0 / r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::FRAC_PI_3;

    fn embed(z: Complex64) -> Vec3 {
        [z.re, z.im, 0.0]
    }

    fn sample_points() -> Vec<Vec3> {
        vec![
            [0.3, -0.2, 0.5],
            [1.0, 2.0, -0.7],
            [-0.1, 0.05, 0.02],
            [2.0, 0.0, 0.0],
        ]
    }

    fn chain() -> SpaceMobius {
        SpaceMobius::identity()
            .translation([0.4, -1.0, 0.3])
            .rotation(Mat3::rotation_about_w(FRAC_PI_3))
            .inversion()
            .dilation(2.5)
            .translation([-0.2, 0.1, 0.6])
    }

    #[test]
    fn inverse_round_trips() {
        let t = chain();
        let tinv = t.inverse();
        for x in sample_points() {
            let y = t.apply(x).unwrap();
            let back = tinv.apply(y).unwrap();
            assert_abs_diff_eq!(geom::dist(back, x), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn factor_matches_finite_differences() {
        let t = chain();
        let h = 1e-6;
        for x in sample_points() {
            let (y, lambda, q) = t.apply_frame(x).unwrap();
            // Orthogonality of the frame.
            let qt = q.transpose();
            let prod = qt.mul(&q);
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(prod.0[i][j], expect, epsilon = 1e-12);
                }
            }
            // |T(x + h e_k) − T(x)| ≈ λ h, and the direction matches λ·Q e_k.
            for k in 0..3 {
                let mut xe = x;
                xe[k] += h;
                let ye = t.apply(xe).unwrap();
                let diff = geom::scale(1.0 / h, geom::sub(ye, y));
                assert_relative_eq!(geom::norm(diff), lambda, max_relative = 1e-4);
                let col = q.apply([
                    if k == 0 { 1.0 } else { 0.0 },
                    if k == 1 { 1.0 } else { 0.0 },
                    if k == 2 { 1.0 } else { 0.0 },
                ]);
                // Q was accumulated left-to-right, so Q e_k is the image
                // direction of the k-th coordinate axis.
                assert_abs_diff_eq!(
                    geom::dist(diff, geom::scale(lambda, col)),
                    0.0,
                    epsilon = 1e-4 * lambda
                );
            }
        }
    }

    #[test]
    fn inversion_pole_is_reported() {
        let t = SpaceMobius::identity().inversion();
        let err = t.apply([0.0, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::InversionPole { .. }));
        // Poles reached mid-chain are caught too.
        let t = SpaceMobius::identity()
            .translation([-1.0, 0.0, 0.0])
            .inversion();
        assert!(t.apply([1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn extension_restricts_to_planar_mobius() {
        for &c in &[
            Complex64::new(0.75, 0.0),
            Complex64::new(-0.3, 0.4),
            Complex64::new(0.0, 1.2),
        ] {
            let t = SpaceMobius::unit_disk_extension(c);
            for &z in &[
                Complex64::new(0.3, 0.0),
                Complex64::new(-0.5, 0.1),
                Complex64::new(0.2, -0.6),
                Complex64::new(0.9, 0.0),
            ] {
                let expect = z / (1.0 + c * z);
                let got = t.apply(embed(z)).unwrap();
                assert_abs_diff_eq!(geom::dist(got, embed(expect)), 0.0, epsilon = 1e-12);
                // Conformal factor is |d/dz (z/(1+cz))| = 1/|1+cz|².
                let lambda = t.conformal_factor(embed(z)).unwrap();
                assert_relative_eq!(
                    lambda,
                    1.0 / (1.0 + c * z).norm_sqr(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn extension_of_zero_is_identity() {
        let t = SpaceMobius::unit_disk_extension(Complex64::new(0.0, 0.0));
        let x = [0.3, 0.4, 0.5];
        assert_abs_diff_eq!(geom::dist(t.apply(x).unwrap(), x), 0.0, epsilon = 0.0);
    }
}
