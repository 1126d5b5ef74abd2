//! JSON experiment configuration. Parsing is sectioned so schema errors name
//! the offending field; unknown fields are rejected everywhere.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::peetre::{PeetreSpec, SequenceSpaceSpec, WeightScheme};
use crate::spaces::{LorentzWeight, OrliczFunction, SpaceSpec};
use crate::step::{MeasurableSet, StepFunction};

#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    pub spaces: Option<SpacesConfig>,
    pub weights: Option<WeightsConfig>,
    pub w: Option<SequenceSpaceConfig>,
    pub function: Option<FunctionConfig>,
    pub tau_grid: Option<TauGridConfig>,
    pub experiment: Option<ExperimentParams>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacesConfig {
    pub e: SpaceConfig,
    pub f: Option<SpaceConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceConfig {
    Lp { p: f64 },
    Linf,
    OrliczExpSquared,
    OrliczPower { p: f64 },
    LorentzPower { alpha: f64 },
}

impl SpaceConfig {
    pub fn build(&self) -> Result<SpaceSpec> {
        match self {
            SpaceConfig::Lp { p } => SpaceSpec::lp(*p),
            SpaceConfig::Linf => Ok(SpaceSpec::l_infinity()),
            SpaceConfig::OrliczExpSquared => Ok(SpaceSpec::orlicz_exp_squared()),
            SpaceConfig::OrliczPower { p } => SpaceSpec::orlicz(OrliczFunction::Power { p: *p }),
            SpaceConfig::LorentzPower { alpha } => {
                SpaceSpec::lorentz(LorentzWeight::Power { alpha: *alpha })
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightsConfig {
    Geometric { a0: f64, rho: f64, b0: f64, sigma: f64 },
    Prefixed {
        a_prefix: Vec<f64>,
        b_prefix: Vec<f64>,
        a0: f64,
        rho: f64,
        b0: f64,
        sigma: f64,
    },
}

impl WeightsConfig {
    pub fn build(&self) -> Result<WeightScheme> {
        match self {
            WeightsConfig::Geometric { a0, rho, b0, sigma } => {
                WeightScheme::geometric(*a0, *rho, *b0, *sigma)
            }
            WeightsConfig::Prefixed { a_prefix, b_prefix, a0, rho, b0, sigma } => {
                WeightScheme::prefixed(a_prefix.clone(), b_prefix.clone(), *a0, *rho, *b0, *sigma)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSpaceConfig {
    Lp { p: f64 },
    Sup,
    WeightedLp { p: f64, gamma: f64 },
}

impl SequenceSpaceConfig {
    pub fn build(&self) -> Result<SequenceSpaceSpec> {
        match self {
            SequenceSpaceConfig::Lp { p } => SequenceSpaceSpec::lp(*p),
            SequenceSpaceConfig::Sup => Ok(SequenceSpaceSpec::sup()),
            SequenceSpaceConfig::WeightedLp { p, gamma } => {
                SequenceSpaceSpec::weighted_lp(*p, *gamma)
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionConfig {
    Explicit { breakpoints: Vec<f64>, values: Vec<f64> },
    Random { seed: u64, cells: usize, amplitude: f64 },
    Indicator { intervals: Vec<[f64; 2]> },
    /// `scale * chi_[0, tau]`.
    ScaledIndicator { tau: f64, scale: f64 },
}

impl FunctionConfig {
    /// Builds the function; `seed_override` replaces the seed of a random
    /// generator spec.
    pub fn build(&self, seed_override: Option<u64>) -> Result<StepFunction> {
        match self {
            FunctionConfig::Explicit { breakpoints, values } => {
                StepFunction::new(breakpoints.clone(), values.clone())
            }
            FunctionConfig::Random { seed, cells, amplitude } => {
                StepFunction::random(seed_override.unwrap_or(*seed), *cells, *amplitude)
            }
            FunctionConfig::Indicator { intervals } => {
                let set =
                    MeasurableSet::from_intervals(intervals.iter().map(|iv| (iv[0], iv[1])))?;
                Ok(StepFunction::indicator(&set))
            }
            FunctionConfig::ScaledIndicator { tau, scale } => {
                Ok(StepFunction::prefix_indicator(*tau)?.scale(*scale))
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TauGridConfig {
    List(Vec<f64>),
    Dyadic { dyadic: u32 },
}

impl TauGridConfig {
    /// Explicit list, or `2^{-1}, ..., 2^{-k}` for the dyadic form.
    pub fn build(&self) -> Result<Vec<f64>> {
        match self {
            TauGridConfig::List(v) => {
                if v.is_empty() {
                    return Err(Error::Config("field `tau_grid`: empty grid".into()));
                }
                for t in v {
                    if !t.is_finite() || *t <= 0.0 || *t > 1.0 {
                        return Err(Error::TauOutOfRange(*t));
                    }
                }
                Ok(v.clone())
            }
            TauGridConfig::Dyadic { dyadic } => {
                if *dyadic == 0 {
                    return Err(Error::Config("field `tau_grid`: dyadic depth must be >= 1".into()));
                }
                Ok((1..=*dyadic).map(|k| 0.5f64.powi(k as i32)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentParams {
    pub epsilon0: Option<f64>,
    pub n0: Option<usize>,
    pub epsilon: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub threshold: Option<f64>,
    pub tol: Option<f64>,
    pub family: Option<FamilyConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    ShrinkingBlocks { count: usize },
    Explicit { functions: Vec<FunctionConfig> },
}

impl FamilyConfig {
    pub fn build(&self) -> Result<Vec<StepFunction>> {
        match self {
            FamilyConfig::ShrinkingBlocks { count } => {
                crate::experiments::shrinking_block_family(*count)
            }
            FamilyConfig::Explicit { functions } => {
                functions.iter().map(|f| f.build(None)).collect()
            }
        }
    }
}

fn section<T: serde::de::DeserializeOwned>(
    obj: &serde_json::Map<String, serde_json::Value>,
    name: &str,
) -> Result<Option<T>> {
    match obj.get(name) {
        None | Some(serde_json::Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| Error::Config(format!("field `{name}`: {e}"))),
    }
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Config("top level must be a JSON object".into()))?;
        const KNOWN: [&str; 6] = ["spaces", "weights", "W", "function", "tau_grid", "experiment"];
        for key in obj.keys() {
            if !KNOWN.contains(&key.as_str()) {
                return Err(Error::Config(format!("unknown field `{key}`")));
            }
        }
        Ok(Self {
            spaces: section(obj, "spaces")?,
            weights: section(obj, "weights")?,
            w: section(obj, "W")?,
            function: section(obj, "function")?,
            tau_grid: section(obj, "tau_grid")?,
            experiment: section(obj, "experiment")?,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    fn spaces(&self) -> Result<&SpacesConfig> {
        self.spaces
            .as_ref()
            .ok_or_else(|| Error::Config("field `spaces` is required".into()))
    }

    pub fn space_e(&self) -> Result<SpaceSpec> {
        self.spaces()?.e.build()
    }

    pub fn space_f(&self) -> Result<SpaceSpec> {
        self.spaces()?
            .f
            .as_ref()
            .ok_or_else(|| Error::Config("field `spaces.f` is required".into()))?
            .build()
    }

    pub fn build_weights(&self) -> Result<WeightScheme> {
        self.weights
            .as_ref()
            .ok_or_else(|| Error::Config("field `weights` is required".into()))?
            .build()
    }

    pub fn build_w(&self) -> Result<SequenceSpaceSpec> {
        self.w
            .as_ref()
            .ok_or_else(|| Error::Config("field `W` is required".into()))?
            .build()
    }

    pub fn build_function(&self, seed_override: Option<u64>) -> Result<StepFunction> {
        self.function
            .as_ref()
            .ok_or_else(|| Error::Config("field `function` is required".into()))?
            .build(seed_override)
    }

    pub fn build_tau_grid(&self) -> Result<Vec<f64>> {
        self.tau_grid
            .as_ref()
            .ok_or_else(|| Error::Config("field `tau_grid` is required".into()))?
            .build()
    }

    pub fn build_peetre_spec(&self) -> Result<PeetreSpec> {
        PeetreSpec::new(self.space_e()?, self.space_f()?, self.build_w()?, self.build_weights()?)
    }

    pub fn params(&self) -> ExperimentParams {
        self.experiment.clone().unwrap_or_default()
    }

    pub fn build_family(&self) -> Result<Vec<StepFunction>> {
        self.params()
            .family
            .ok_or_else(|| Error::Config("field `experiment.family` is required".into()))?
            .build()
    }
}

impl ExperimentParams {
    pub fn epsilon0(&self) -> f64 {
        self.epsilon0.unwrap_or(0.1)
    }

    pub fn n0(&self) -> usize {
        self.n0.unwrap_or(3)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(0.1)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(64)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(7)
    }

    pub fn a(&self) -> f64 {
        self.a.unwrap_or(1.0)
    }

    pub fn b(&self) -> f64 {
        self.b.unwrap_or(1.0)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold.unwrap_or(0.1)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-8)
    }
}
