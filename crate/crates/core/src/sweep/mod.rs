//! Parameter sweeps, CSV output, figure presets and config files behind the
//! `ricecap` binary.

mod config;
mod csv;
mod figures;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::bounds::{
    asymptotic_capacity_large_nt, capacity_upper_bound, deterministic_capacity,
    new_scheme_large_kappa_approx, new_scheme_lower_bound, new_scheme_upper_bound,
    CapacityEstimate,
};
use crate::channel::{db_to_linear, ChannelConfig, CovarianceScheme};
use crate::error::{Error, Result};
use crate::estimators::{
    mc_ergodic_capacity, mc_new_scheme_capacity, quadrature_capacity_m1, MonteCarloSpec,
};
use crate::special::QuadratureRule;

pub use config::{FixedConfig, GridConfig, McConfig, SweepConfig};
pub use csv::{emit_csv, format_number, write_csv, ERROR_MARKER};
pub use figures::{figure, run_figure, Figure, FIGURE_SNR_DB};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Kappa,
    NT,
    NR,
    #[serde(alias = "snr_db")]
    PowerDb,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Kappa => "kappa",
            SweepVariable::NT => "n_t",
            SweepVariable::NR => "n_r",
            SweepVariable::PowerDb => "power_db",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, SweepVariable::NT | SweepVariable::NR)
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "kappa" => Ok(SweepVariable::Kappa),
            "n_t" | "nt" => Ok(SweepVariable::NT),
            "n_r" | "nr" => Ok(SweepVariable::NR),
            "power_db" | "snr_db" => Ok(SweepVariable::PowerDb),
            _ => Err(Error::InvalidParameter(format!(
                "unknown sweep variable '{s}' (expected kappa, n_t, n_r or power_db)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    UpperBound,
    Deterministic,
    Asymptotic,
    McIdentity,
    QuadM1,
    NewSchemeMc,
    NewSchemeUb,
    NewSchemeLb,
    NewSchemeApprox,
}

impl SweepMethod {
    pub const ALL: [SweepMethod; 9] = [
        SweepMethod::UpperBound,
        SweepMethod::Deterministic,
        SweepMethod::Asymptotic,
        SweepMethod::McIdentity,
        SweepMethod::QuadM1,
        SweepMethod::NewSchemeMc,
        SweepMethod::NewSchemeUb,
        SweepMethod::NewSchemeLb,
        SweepMethod::NewSchemeApprox,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepMethod::UpperBound => "upper_bound",
            SweepMethod::Deterministic => "deterministic",
            SweepMethod::Asymptotic => "asymptotic",
            SweepMethod::McIdentity => "mc_identity",
            SweepMethod::QuadM1 => "quad_m1",
            SweepMethod::NewSchemeMc => "new_scheme_mc",
            SweepMethod::NewSchemeUb => "new_scheme_ub",
            SweepMethod::NewSchemeLb => "new_scheme_lb",
            SweepMethod::NewSchemeApprox => "new_scheme_approx",
        }
    }

    /// Rejects configurations the method does not cover.
    fn check(self, cfg: &ChannelConfig) -> std::result::Result<(), String> {
        match self {
            SweepMethod::QuadM1 if cfg.m() != 1 => Err(format!(
                "quad_m1 needs min(n_t, n_r) = 1, got n_t={}, n_r={}",
                cfg.n_t(),
                cfg.n_r()
            )),
            SweepMethod::NewSchemeMc
            | SweepMethod::NewSchemeUb
            | SweepMethod::NewSchemeLb
            | SweepMethod::NewSchemeApprox
                if cfg.n_r() != 1 =>
            {
                Err(format!(
                    "{} needs n_r = 1, got n_r={}",
                    self.name(),
                    cfg.n_r()
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn evaluate(self, cfg: &ChannelConfig, mc: &MonteCarloSpec) -> Result<CapacityEstimate> {
        let rule = QuadratureRule::default();
        match self {
            SweepMethod::UpperBound => Ok(capacity_upper_bound(cfg)),
            SweepMethod::Deterministic => Ok(deterministic_capacity(cfg)),
            SweepMethod::Asymptotic => {
                asymptotic_capacity_large_nt(cfg.n_r(), cfg.kappa(), cfg.power())
            }
            SweepMethod::McIdentity => {
                mc_ergodic_capacity(cfg, &CovarianceScheme::scaled_identity(cfg), mc)
            }
            SweepMethod::QuadM1 => quadrature_capacity_m1(cfg, &rule),
            SweepMethod::NewSchemeMc => mc_new_scheme_capacity(cfg, mc),
            SweepMethod::NewSchemeUb => new_scheme_upper_bound(cfg),
            SweepMethod::NewSchemeLb => new_scheme_lower_bound(cfg, &rule),
            SweepMethod::NewSchemeApprox => new_scheme_large_kappa_approx(cfg),
        }
    }
}

impl fmt::Display for SweepMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        SweepMethod::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| {
                let names: Vec<&str> = SweepMethod::ALL.iter().map(|m| m.name()).collect();
                Error::InvalidParameter(format!(
                    "unknown method '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

impl FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nats" => Ok(Units::Nats),
            "bits" => Ok(Units::Bits),
            _ => Err(Error::InvalidParameter(format!(
                "unknown units '{s}' (expected nats or bits)"
            ))),
        }
    }
}

/// Grid points of the swept variable. `Range` has `steps` evenly spaced points
/// including both ends.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, steps: usize },
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let values = match self {
            Grid::List(v) => v.clone(),
            Grid::Range { start, stop, steps } => {
                if *steps == 0 {
                    return Err(Error::InvalidParameter(
                        "grid needs at least one step".into(),
                    ));
                }
                if *steps == 1 {
                    vec![*start]
                } else {
                    let h = (stop - start) / (*steps - 1) as f64;
                    (0..*steps)
                        .map(|i| {
                            if i + 1 == *steps {
                                *stop
                            } else {
                                start + h * i as f64
                            }
                        })
                        .collect()
                }
            }
        };
        if values.is_empty() {
            return Err(Error::InvalidParameter("grid is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("grid values must be finite".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "grid must be strictly increasing".into(),
            ));
        }
        Ok(values)
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `a,b,c` for a list or `start:stop:steps` for a range.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::InvalidParameter(format!("cannot parse grid '{s}': {what}"));
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| bad(&format!("'{}' is not a number", t.trim())))
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("expected start:stop:steps"));
            }
            let steps = parts[2]
                .trim()
                .parse::<usize>()
                .map_err(|_| bad("steps must be a positive integer"))?;
            Ok(Grid::Range {
                start: num(parts[0])?,
                stop: num(parts[1])?,
                steps,
            })
        } else {
            Ok(Grid::List(s.split(',').map(num).collect::<Result<_>>()?))
        }
    }
}

/// Parameters held fixed while one variable is swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParams {
    pub n_t: usize,
    pub n_r: usize,
    pub kappa: f64,
    pub snr_db: f64,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            n_t: 1,
            n_r: 1,
            kappa: 0.0,
            snr_db: 10.0,
        }
    }
}

impl FixedParams {
    fn with(&self, variable: SweepVariable, value: f64) -> Result<ChannelConfig> {
        let mut p = *self;
        match variable {
            SweepVariable::Kappa => p.kappa = value,
            SweepVariable::NT => p.n_t = value as usize,
            SweepVariable::NR => p.n_r = value as usize,
            SweepVariable::PowerDb => p.snr_db = value,
        }
        ChannelConfig::from_snr_db(p.n_t, p.n_r, p.kappa, p.snr_db)
    }

    pub fn config(&self) -> Result<ChannelConfig> {
        ChannelConfig::new(self.n_t, self.n_r, self.kappa, db_to_linear(self.snr_db))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Grid,
    pub fixed: FixedParams,
    pub methods: Vec<SweepMethod>,
    pub mc: MonteCarloSpec,
    pub units: Units,
}

impl SweepSpec {
    /// Channel configuration for every grid point, after checking that each
    /// method applies to each point.
    pub fn points(&self) -> Result<Vec<(f64, ChannelConfig)>> {
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("no methods requested".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::InvalidParameter(format!(
                    "method {m} requested twice"
                )));
            }
        }
        let values = self.grid.values()?;
        values
            .into_iter()
            .map(|v| {
                if self.variable.is_integer() && !(v >= 1.0 && v.fract() == 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "{} grid values must be positive integers, got {v}",
                        self.variable
                    )));
                }
                let cfg = self.fixed.with(self.variable, v)?;
                for m in &self.methods {
                    m.check(&cfg).map_err(|e| {
                        Error::InvalidParameter(format!(
                            "at {}={}: {e}",
                            self.variable,
                            format_number(v)
                        ))
                    })?;
                }
                Ok((v, cfg))
            })
            .collect()
    }
}

/// One computed value, or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Value { capacity: f64, uncertainty: f64 },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// One cell per column of the owning table.
    pub cells: Vec<Cell>,
}

/// Rows in grid order with one column per method (or method and series).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub units: Units,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for row in &self.rows {
            for (col, cell) in self.columns.iter().zip(&row.cells) {
                if let Cell::Failed(msg) = cell {
                    out.push(format!(
                        "{}={} {}: {msg}",
                        self.variable,
                        format_number(row.value),
                        col
                    ));
                }
            }
        }
        out
    }
}

/// splitmix64 of `seed` advanced by `index + 1` golden-ratio steps.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Evaluates every method at every grid point. Points run in parallel; MC
/// methods at grid index `i` use seed `derive_seed(mc.seed, i)`. A failure at
/// one point is recorded in its cell and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    let points = spec.points()?;
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(i, (value, cfg))| {
            let mc = spec.mc.with_seed(derive_seed(spec.mc.seed(), i as u64));
            let cells = spec
                .methods
                .iter()
                .map(|m| match m.evaluate(cfg, &mc) {
                    Ok(est) => Cell::Value {
                        capacity: spec.units.convert(est.nats),
                        uncertainty: spec.units.convert(est.uncertainty),
                    },
                    Err(e) => Cell::Failed(e.to_string()),
                })
                .collect();
            SweepRow {
                value: *value,
                cells,
            }
        })
        .collect();
    Ok(SweepTable {
        variable: spec.variable,
        units: spec.units,
        columns: spec.methods.iter().map(|m| m.name().to_string()).collect(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(variable: SweepVariable, grid: &str, methods: &[SweepMethod]) -> SweepSpec {
        SweepSpec {
            variable,
            grid: grid.parse().unwrap(),
            fixed: FixedParams::default(),
            methods: methods.to_vec(),
            mc: MonteCarloSpec::new(2000, 1, 4, 0.95).unwrap(),
            units: Units::Nats,
        }
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(
            "1,2,4".parse::<Grid>().unwrap().values().unwrap(),
            vec![1.0, 2.0, 4.0]
        );
        assert_eq!(
            "0:1:5".parse::<Grid>().unwrap().values().unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(
            "3:9:1".parse::<Grid>().unwrap().values().unwrap(),
            vec![3.0]
        );
        assert!("1,1".parse::<Grid>().unwrap().values().is_err());
        assert!("2,1".parse::<Grid>().unwrap().values().is_err());
        assert!("0:1:0".parse::<Grid>().unwrap().values().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("a,b".parse::<Grid>().is_err());
    }

    #[test]
    fn names_round_trip() {
        for m in SweepMethod::ALL {
            assert_eq!(m.name().parse::<SweepMethod>().unwrap(), m);
        }
        assert!("mc".parse::<SweepMethod>().is_err());
        assert_eq!(
            "snr-db".parse::<SweepVariable>().unwrap(),
            SweepVariable::PowerDb
        );
        assert_eq!("BITS".parse::<Units>().unwrap(), Units::Bits);
    }

    #[test]
    fn empty_methods_rejected() {
        assert!(run_sweep(&spec(SweepVariable::Kappa, "0,1", &[])).is_err());
        let dup = [SweepMethod::UpperBound, SweepMethod::UpperBound];
        assert!(run_sweep(&spec(SweepVariable::Kappa, "0,1", &dup)).is_err());
    }

    #[test]
    fn method_validity_checked_per_point() {
        let s = spec(SweepVariable::NR, "1,2", &[SweepMethod::NewSchemeUb]);
        assert!(run_sweep(&s).is_err());
        let mut s = spec(SweepVariable::NT, "1,2,3", &[SweepMethod::QuadM1]);
        s.fixed.n_r = 2;
        assert!(run_sweep(&s).is_err());
        assert!(run_sweep(&spec(
            SweepVariable::NT,
            "1,2.5",
            &[SweepMethod::UpperBound]
        ))
        .is_err());
    }

    #[test]
    fn rows_in_grid_order_and_units() {
        let methods = [SweepMethod::UpperBound, SweepMethod::McIdentity];
        let s = spec(SweepVariable::Kappa, "0:10:11", &methods);
        let nats = run_sweep(&s).unwrap();
        let bits = run_sweep(&SweepSpec {
            units: Units::Bits,
            ..s
        })
        .unwrap();
        assert_eq!(nats.rows.len(), 11);
        for (i, (a, b)) in nats.rows.iter().zip(&bits.rows).enumerate() {
            assert_eq!(a.value, i as f64);
            for (ca, cb) in a.cells.iter().zip(&b.cells) {
                match (ca, cb) {
                    (Cell::Value { capacity: x, .. }, Cell::Value { capacity: y, .. }) => {
                        assert!((x / y - std::f64::consts::LN_2).abs() < 1e-12)
                    }
                    _ => panic!("unexpected failure"),
                }
            }
        }
    }

    #[test]
    fn seeds_differ_per_point() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }
}
