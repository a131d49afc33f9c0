//! Catalogue of worked harmonic mappings with closed-form oracles.
//!
//! Three families. The exponential family h = c·e^{tπz}, g = c⁻¹e^{−tπz}
//! lifts onto a catenoid; its Schwarzian, conformal factor, and curvature
//! term all collapse to elementary expressions in x = Re z. The other two
//! families share one construction: given an analytic F with F(0-symmetry)
//! and i/c outside its range, set G = (cF + i)/(cF − i) and take
//! h = G, g = 1/G, q = i/G, so f = G + 1/conj(G) and the image circle
//! |G| = 1 lifts to the catenoid's circle of symmetry. For odd F this is
//! the same map as h = G(z), g = G(−z). The closed forms below depend only
//! on F and F′, which makes them independent cross-checks of the jet
//! engine's route through σ.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::expr::AnalyticFn;
use crate::harmonic::HarmonicMap;
use crate::nehari::NehariFunction;

/// Probe points along the imaginary axis for the i/c range exclusion.
const PROBE_SAMPLES: usize = 4000;
/// The range probe stops just short of the boundary.
const PROBE_YMAX: f64 = 1.0 - 1e-9;
/// Required slack in c·(probed sup) < 1.
const PROBE_HEADROOM: f64 = 1e-6;

/// A catalogued family together with its parameters.
#[derive(Debug, Clone)]
pub enum ExampleFamily {
    /// h = c·e^{tπz}, g = c⁻¹e^{−tπz}. The lift identifies z and z + 2i/t,
    /// meets itself at ±i when t = 1, and satisfies the π²/4-criterion
    /// with margin identically zero exactly where e^{2σ} ≥ 8t²π².
    CatenoidExp { c: f64, t: f64 },
    /// h = G, g = 1/G for G = (cF + i)/(cF − i), F the analytic extremal
    /// of `weight`. Requires i/c outside the range of F (probed).
    StripCatenoid { weight: NehariFunction, c: f64 },
    /// Same construction with the spiral F = ((1+z)/(1−z))^{iε}, which is
    /// far from injective: it takes the value 1 infinitely often.
    Hille { eps: f64, c: f64 },
}

impl ExampleFamily {
    /// Short stable name, used by the command line and file naming.
    pub fn name(&self) -> &'static str {
        match self {
            ExampleFamily::CatenoidExp { .. } => "catenoid_exp",
            ExampleFamily::StripCatenoid { .. } => "strip_catenoid",
            ExampleFamily::Hille { .. } => "hille",
        }
    }

    /// Defining formula with the parameters substituted.
    pub fn formula(&self) -> String {
        match self {
            ExampleFamily::CatenoidExp { c, t } => format!(
                "h = {c}·exp({t}πz), g = exp(−{t}πz)/{c}, q = (i/{c})·exp(−{t}πz)"
            ),
            ExampleFamily::StripCatenoid { weight, c } => format!(
                "G = ({c}F + i)/({c}F − i) with F the extremal of {}; h = G, g = 1/G, q = i/G",
                weight_name(weight)
            ),
            ExampleFamily::Hille { eps, c } => format!(
                "G = ({c}F + i)/({c}F − i) with F = ((1+z)/(1−z))^(i·{eps}); h = G, g = 1/G, q = i/G"
            ),
        }
    }
}

/// A realized catalogue entry: the harmonic map plus closed-form evaluators.
#[derive(Debug, Clone)]
pub struct ExampleMap {
    family: ExampleFamily,
    map: HarmonicMap,
    extremal: Option<AnalyticFn>,
    weight: Option<NehariFunction>,
}

impl ExampleMap {
    pub fn family(&self) -> &ExampleFamily {
        &self.family
    }

    pub fn map(&self) -> &HarmonicMap {
        &self.map
    }

    /// The analytic F behind the Möbius composition, when there is one.
    pub fn extremal(&self) -> Option<&AnalyticFn> {
        self.extremal.as_ref()
    }

    /// The weight whose criterion this entry is tested against. None for
    /// the Hille family, whose bound carries the fitted excess δ instead.
    pub fn criterion_weight(&self) -> Option<&NehariFunction> {
        self.weight.as_ref()
    }

    /// Closed-form Schwarzian derivative of the map.
    pub fn closed_schwarzian(&self, z: Complex64) -> Result<Complex64> {
        match &self.family {
            ExampleFamily::CatenoidExp { t, .. } => {
                let tp = t * PI;
                let es = self.closed_conformal_factor(z)?;
                Ok(Complex64::new(
                    -tp * tp / 2.0 + 4.0 * tp.powi(4) / (es * es),
                    0.0,
                ))
            }
            ExampleFamily::StripCatenoid { c, .. } | ExampleFamily::Hille { c, .. } => {
                let j = self.extremal_jet(z)?;
                let sf = self.closed_extremal_schwarzian(z)?;
                let c2 = c * c;
                let one = Complex64::new(1.0, 0.0);
                let fb = j.f0.conj();
                let den = (one + c2 * j.f0 * j.f0) * (1.0 + c2 * j.f0.norm_sqr()).powi(2);
                Ok(sf - 4.0 * c2 * (one + c2 * fb * fb) * j.f1 * j.f1 / den)
            }
        }
    }

    /// Closed-form e^σ = |h′| + |g′|.
    pub fn closed_conformal_factor(&self, z: Complex64) -> Result<f64> {
        match &self.family {
            ExampleFamily::CatenoidExp { c, t } => {
                let tp = t * PI;
                let x = z.re;
                Ok(tp * (c * (tp * x).exp() + (-tp * x).exp() / c))
            }
            ExampleFamily::StripCatenoid { c, .. } | ExampleFamily::Hille { c, .. } => {
                let j = self.extremal_jet(z)?;
                let i = Complex64::new(0.0, 1.0);
                let cf = c * j.f0;
                let num = 2.0 * c * j.f1.norm();
                Ok(num / (cf - i).norm_sqr() + num / (cf + i).norm_sqr())
            }
        }
    }

    /// Closed-form e^{2σ}|K| = 4|q′|²/(1 + |q|²)².
    pub fn closed_curvature_term(&self, z: Complex64) -> Result<f64> {
        match &self.family {
            ExampleFamily::CatenoidExp { t, .. } => {
                let tp = t * PI;
                let es = self.closed_conformal_factor(z)?;
                Ok(4.0 * tp.powi(4) / (es * es))
            }
            ExampleFamily::StripCatenoid { c, .. } | ExampleFamily::Hille { c, .. } => {
                let j = self.extremal_jet(z)?;
                let c2 = c * c;
                Ok(4.0 * c2 * j.f1.norm_sqr() / (1.0 + c2 * j.f0.norm_sqr()).powi(2))
            }
        }
    }

    /// Closed-form Schwarzian of the underlying analytic F.
    pub fn closed_extremal_schwarzian(&self, z: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        match &self.family {
            ExampleFamily::StripCatenoid { weight, .. } => match weight {
                NehariFunction::PiSqOverFour => Ok(Complex64::new(PI * PI / 2.0, 0.0)),
                NehariFunction::Nehari2 => {
                    let d = one - z * z;
                    Ok(2.0 / (d * d))
                }
                NehariFunction::TwoOver => Ok(4.0 / (one - z * z)),
                other => Err(Error::Param(format!(
                    "no closed extremal Schwarzian for weight {}",
                    weight_name(other)
                ))),
            },
            ExampleFamily::Hille { eps, .. } => {
                let d = one - z * z;
                Ok(2.0 * (1.0 + eps * eps) / (d * d))
            }
            ExampleFamily::CatenoidExp { .. } => Err(Error::NotApplicable(
                "the exponential family is not built from an analytic extremal".into(),
            )),
        }
    }

    fn extremal_jet(&self, z: Complex64) -> Result<crate::jet::Jet3> {
        self.extremal
            .as_ref()
            .expect("composition families carry their extremal")
            .jet(z)
    }
}

/// Build a catalogue entry, validating parameters.
pub fn make_example(family: ExampleFamily) -> Result<ExampleMap> {
    match &family {
        ExampleFamily::CatenoidExp { c, t } => {
            positive(*c, "catenoid coefficient c")?;
            positive(*t, "catenoid scale t")?;
            let z = AnalyticFn::var();
            let ep = z.scale(t * PI).exp();
            let em = z.scale(-t * PI).exp();
            let h = ep.scale(*c);
            let g = em.scale(1.0 / c);
            let q = em.mul(&AnalyticFn::constant(Complex64::new(0.0, 1.0 / c)));
            let map = HarmonicMap::new(h, g, q, Complex64::new(0.0, 0.0))?;
            Ok(ExampleMap {
                family,
                map,
                extremal: None,
                weight: Some(NehariFunction::PiSqOverFour),
            })
        }
        ExampleFamily::StripCatenoid { weight, c } => {
            positive(*c, "composition coefficient c")?;
            let f = analytic_extremal(weight)?;
            // For odd F with real Taylor coefficients, injectivity pins the
            // preimage of the imaginary axis to the imaginary axis (a
            // preimage z of is satisfies F(−conj z) = −conj F(z) = F(z)),
            // so i/c avoids the range iff c·sup_y Im F(iy) < 1. Some
            // extremals have unbounded Im F near ±1, so probing the whole
            // disk would reject admissible c.
            let sup = sup_im_on_imaginary_axis(&f)?;
            check_exclusion(*c, sup, "sup Im F on the imaginary axis")?;
            let (map, extremal) = catenoid_composition(&f, *c)?;
            let weight = weight.clone();
            Ok(ExampleMap {
                family,
                map,
                extremal: Some(extremal),
                weight: Some(weight),
            })
        }
        ExampleFamily::Hille { eps, c } => {
            positive(*eps, "spiral exponent ε")?;
            positive(*c, "composition coefficient c")?;
            let f = hille_extremal(*eps);
            // Not odd: F(−z) = 1/F(z). Both ±i/c must avoid the range, and
            // e^{−επ/2} ≤ |F| ≤ e^{επ/2} makes a modulus probe sufficient.
            let sup = sup_abs_near_boundary(&f)?;
            check_exclusion(*c, sup, "sup |F| near the boundary")?;
            let (map, extremal) = catenoid_composition(&f, *c)?;
            Ok(ExampleMap {
                family,
                map,
                extremal: Some(extremal),
                weight: None,
            })
        }
    }
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Param(format!("{what} must be positive, got {v}")))
    }
}

fn check_exclusion(c: f64, sup: f64, probe: &str) -> Result<()> {
    if c * sup >= 1.0 - PROBE_HEADROOM {
        return Err(Error::Param(format!(
            "c = {c} places i/c = {:.6}i inside the range of the extremal ({probe} = {sup:.6})",
            1.0 / c
        )));
    }
    Ok(())
}

/// h = G, g = 1/G, q = i/G for G = (cF + i)/(cF − i).
fn catenoid_composition(f: &AnalyticFn, c: f64) -> Result<(HarmonicMap, AnalyticFn)> {
    let i = AnalyticFn::i();
    let cf = f.scale(c);
    let g_mob = cf.add(&i).div(&cf.sub(&i));
    let h = g_mob.clone();
    let g = AnalyticFn::one().div(&g_mob);
    let q = i.div(&g_mob);
    let map = HarmonicMap::new(h, g, q, Complex64::new(0.0, 0.0))?;
    Ok((map, f.clone()))
}

/// The analytic extremal F with 𝒮F = 2p for the catalogued weights.
fn analytic_extremal(p: &NehariFunction) -> Result<AnalyticFn> {
    let z = AnalyticFn::var();
    let one = AnalyticFn::one();
    match p {
        // (2/π)tan(πz/2) = (−2i/π)(e^{iπz} − 1)/(e^{iπz} + 1); sends the
        // imaginary axis onto the segment |Im w| < (2/π)tanh(π/2).
        NehariFunction::PiSqOverFour => {
            let e = z
                .mul(&AnalyticFn::constant(Complex64::new(0.0, PI)))
                .exp();
            Ok(e.sub(&one)
                .div(&e.add(&one))
                .mul(&AnalyticFn::constant(Complex64::new(0.0, -2.0 / PI))))
        }
        // atanh z; image is the strip |Im w| < π/4.
        NehariFunction::Nehari2 => Ok(one.add(&z).div(&one.sub(&z)).log().scale(0.5)),
        // ∫₀^z (1−ζ²)⁻² dζ = z/(2(1−z²)) + ¼log((1+z)/(1−z)), the extremal
        // of 2(1−x²)⁻¹: its Schwarzian is 4/(1−z²).
        NehariFunction::TwoOver => {
            let omz2 = one.sub(&z.mul(&z));
            Ok(z.div(&omz2.scale(2.0))
                .add(&one.add(&z).div(&one.sub(&z)).log().scale(0.25)))
        }
        other => Err(Error::Param(format!(
            "no catalogued analytic extremal for weight {} (have pi2over4, nehari2, two_over)",
            weight_name(other)
        ))),
    }
}

/// F = ((1+z)/(1−z))^{iε}, principal branch.
fn hille_extremal(eps: f64) -> AnalyticFn {
    let z = AnalyticFn::var();
    let one = AnalyticFn::one();
    one.add(&z)
        .div(&one.sub(&z))
        .pow(Complex64::new(0.0, eps))
}

fn weight_name(p: &NehariFunction) -> String {
    match p {
        NehariFunction::PiSqOverFour => "pi2over4".into(),
        NehariFunction::Nehari2 => "nehari2".into(),
        NehariFunction::TwoOver => "two_over".into(),
        NehariFunction::OneOver => "one_over".into(),
        NehariFunction::Scaled(t, inner) => format!("{t}·{}", weight_name(inner)),
        NehariFunction::Custom { name, .. } => name.clone(),
    }
}

fn sup_im_on_imaginary_axis(f: &AnalyticFn) -> Result<f64> {
    let mut sup = 0.0f64;
    for k in 0..PROBE_SAMPLES {
        let y = PROBE_YMAX * (k as f64 + 1.0) / PROBE_SAMPLES as f64;
        sup = sup.max(f.value(Complex64::new(0.0, y))?.im);
    }
    Ok(sup)
}

fn sup_abs_near_boundary(f: &AnalyticFn) -> Result<f64> {
    let r = 1.0 - 1e-6;
    let mut sup = 0.0f64;
    for k in 0..PROBE_SAMPLES {
        let th = 2.0 * PI * (k as f64 + 0.5) / PROBE_SAMPLES as f64;
        sup = sup.max(f.value(Complex64::from_polar(r, th))?.norm());
    }
    Ok(sup)
}
