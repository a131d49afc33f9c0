//! Declarative run configuration: a TOML file mirrored by command-line
//! flags, with every default centralized in the `Default` impls. A config
//! serializes, reparses, and reserializes to identical bytes, so saved runs
//! are reproducible artifacts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use schwarzlift_core::catalogue::{make_example, ExampleFamily};
use schwarzlift_core::error::{Error, Result};
use schwarzlift_core::harmonic::HarmonicMap;
use schwarzlift_core::nehari::NehariFunction;
use schwarzlift_core::parse;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Reserved for sampled operations; every shipped subcommand iterates
    /// deterministically, so runs with equal configs emit equal bytes.
    pub seed: u64,
    pub map: MapSpec,
    pub weight: WeightSpec,
    pub grid: GridSpec,
    pub scan: ScanSpec,
    pub extremal: ExtremalSpec,
    pub mesh: MeshSpec,
    pub convexity: ConvexitySpec,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            map: MapSpec::default(),
            weight: WeightSpec::default(),
            grid: GridSpec::default(),
            scan: ScanSpec::default(),
            extremal: ExtremalSpec::default(),
            mesh: MeshSpec::default(),
            convexity: ConvexitySpec::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Param(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// Which harmonic map to build: a catalogue family or `custom` with
/// expression strings for h, g, q.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapSpec {
    /// catenoid_exp | strip_catenoid | hille | custom.
    pub family: String,
    /// Coefficient c of the exponential and composed families.
    pub c: f64,
    /// Scale t of the exponential family.
    pub t: f64,
    /// Spiral exponent ε of the hille family.
    pub eps: f64,
    /// Extremal weight F of the strip composition (catalogue key).
    pub weight: String,
    /// Expressions for the custom family, in the variable z.
    pub h: Option<String>,
    pub g: Option<String>,
    pub q: Option<String>,
    /// Base point (re, im) for the custom family's height integral.
    pub z0: [f64; 2],
}

impl Default for MapSpec {
    fn default() -> Self {
        MapSpec {
            family: "catenoid_exp".into(),
            c: 60.0,
            t: 1.0,
            eps: 0.05,
            weight: "nehari2".into(),
            h: None,
            g: None,
            q: None,
            z0: [0.0, 0.0],
        }
    }
}

/// A realized map together with the labels the reports carry.
pub struct BuiltMap {
    pub map: HarmonicMap,
    pub family: String,
    pub formula: String,
    /// The weight under which the family satisfies the criterion, if the
    /// catalogue knows one.
    pub weight: Option<NehariFunction>,
}

impl MapSpec {
    pub fn build(&self) -> Result<BuiltMap> {
        match self.family.as_str() {
            "catenoid_exp" => self.example(ExampleFamily::CatenoidExp {
                c: self.c,
                t: self.t,
            }),
            "strip_catenoid" => self.example(ExampleFamily::StripCatenoid {
                weight: NehariFunction::from_name(&self.weight)?,
                c: self.c,
            }),
            "hille" => self.example(ExampleFamily::Hille {
                eps: self.eps,
                c: self.c,
            }),
            "custom" => self.custom(),
            other => Err(Error::Param(format!(
                "unknown family `{other}`; expected catenoid_exp, strip_catenoid, hille or custom"
            ))),
        }
    }

    fn example(&self, family: ExampleFamily) -> Result<BuiltMap> {
        let name = family.name().to_string();
        let formula = family.formula();
        let entry = make_example(family)?;
        Ok(BuiltMap {
            map: entry.map().clone(),
            family: name,
            formula,
            weight: entry.criterion_weight().cloned(),
        })
    }

    fn custom(&self) -> Result<BuiltMap> {
        let (Some(h), Some(g), Some(q)) = (&self.h, &self.g, &self.q) else {
            return Err(Error::Param(
                "custom family needs h, g and q expressions".into(),
            ));
        };
        let map = HarmonicMap::new(
            parse::parse(h)?,
            parse::parse(g)?,
            parse::parse(q)?,
            Complex64::new(self.z0[0], self.z0[1]),
        )?;
        Ok(BuiltMap {
            map,
            family: "custom".into(),
            formula: format!("h = {h}, g = {g}, q = {q}"),
            weight: None,
        })
    }
}

/// The comparison weight p: a catalogue key or an expression in x. Left
/// unset, commands fall back to the map family's natural criterion weight,
/// then to pi2over4.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightSpec {
    pub p: Option<String>,
}

impl WeightSpec {
    /// Catalogue keys pass through; anything else parses as an expression
    /// and is audited for class membership (even, positive, (1−x²)²p
    /// nonincreasing).
    pub fn build(&self) -> Result<NehariFunction> {
        self.build_for(None)
    }

    pub fn build_for(&self, fallback: Option<&NehariFunction>) -> Result<NehariFunction> {
        let Some(text) = &self.p else {
            return Ok(fallback.cloned().unwrap_or(NehariFunction::PiSqOverFour));
        };
        if let Ok(p) = NehariFunction::from_name(text) {
            return Ok(p);
        }
        let p = NehariFunction::Custom {
            f: parse::parse(text)?,
            name: text.clone(),
        };
        p.audit()?;
        Ok(p)
    }
}

/// Polar grid of the criterion check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub nr: usize,
    pub ntheta: usize,
    pub rmax: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            nr: 60,
            ntheta: 60,
            rmax: 0.95,
        }
    }
}

/// Sunflower collision scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSpec {
    pub n: usize,
    pub rmax: f64,
    /// Minimal plane separation of a candidate pair (disk units).
    pub sep: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec {
            n: 4000,
            rmax: 0.95,
            sep: 0.05,
        }
    }
}

/// Extremal profile solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtremalSpec {
    pub rmax: f64,
    pub n: usize,
}

impl Default for ExtremalSpec {
    fn default() -> Self {
        ExtremalSpec {
            rmax: schwarzlift_core::nehari::DEFAULT_RMAX,
            n: 2000,
        }
    }
}

/// Surface mesh export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSpec {
    pub nr: usize,
    pub ntheta: usize,
    pub rmax: f64,
    /// obj | ply.
    pub format: String,
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec {
            nr: 48,
            ntheta: 96,
            rmax: 0.95,
            format: "obj".into(),
        }
    }
}

/// Convexity suite: radial Hessian rays and ω transfer profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvexitySpec {
    /// Equispaced ray count.
    pub angles: usize,
    /// Arclength samples per ray.
    pub samples: usize,
    /// Also run the ω profile after the normalizing transformation.
    pub normalize: bool,
}

impl Default for ConvexitySpec {
    fn default() -> Self {
        ConvexitySpec {
            angles: 8,
            samples: 400,
            normalize: true,
        }
    }
}

/// All tolerances, in the dimensionless units of the criterion margin
/// 2p − |𝒮f| − e^{2σ}|K|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Margins below −criterion fail a check (absolute).
    pub criterion: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { criterion: 1e-9 }
    }
}
