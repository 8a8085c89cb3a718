use std::path::Path;

use serde::Deserialize;

use super::{FixedParams, Grid, SweepMethod, SweepVariable, Units};
use crate::error::{Error, Result};
use crate::estimators::MonteCarloSpec;

/// TOML sweep description. Every field is optional so that command-line
/// flags can fill or override it.
///
/// ```toml
/// variable = "kappa"
/// grid = { start = 0.0, stop = 20.0, steps = 41 }   # or grid = [0, 1, 2]
/// methods = ["upper_bound", "mc_identity"]
/// units = "bits"
///
/// [fixed]
/// nt = 2
/// nr = 2
/// snr_db = 10
///
/// [mc]
/// samples = 200000
/// seed = 7
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: Option<SweepVariable>,
    pub grid: Option<GridConfig>,
    pub methods: Option<Vec<SweepMethod>>,
    pub units: Option<Units>,
    #[serde(default)]
    pub fixed: FixedConfig,
    #[serde(default)]
    pub mc: McConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridConfig {
    List(Vec<f64>),
    Range { start: f64, stop: f64, steps: usize },
}

impl From<GridConfig> for Grid {
    fn from(g: GridConfig) -> Self {
        match g {
            GridConfig::List(v) => Grid::List(v),
            GridConfig::Range { start, stop, steps } => Grid::Range { start, stop, steps },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedConfig {
    pub nt: Option<usize>,
    pub nr: Option<usize>,
    pub kappa: Option<f64>,
    pub snr_db: Option<f64>,
}

impl FixedConfig {
    /// Fields set here replace those of `base`.
    pub fn apply(&self, base: FixedParams) -> FixedParams {
        FixedParams {
            n_t: self.nt.unwrap_or(base.n_t),
            n_r: self.nr.unwrap_or(base.n_r),
            kappa: self.kappa.unwrap_or(base.kappa),
            snr_db: self.snr_db.unwrap_or(base.snr_db),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub shards: Option<usize>,
    pub confidence: Option<f64>,
}

impl McConfig {
    pub fn apply(&self, base: MonteCarloSpec) -> Result<MonteCarloSpec> {
        MonteCarloSpec::new(
            self.samples.unwrap_or(base.samples()),
            self.seed.unwrap_or(base.seed()),
            self.shards.unwrap_or(base.shards()),
            self.confidence.unwrap_or(base.confidence()),
        )
    }

    /// `other`'s fields win where set.
    pub fn overridden_by(&self, other: &McConfig) -> McConfig {
        McConfig {
            samples: other.samples.or(self.samples),
            seed: other.seed.or(self.seed),
            shards: other.shards.or(self.shards),
            confidence: other.confidence.or(self.confidence),
        }
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
    }
}
