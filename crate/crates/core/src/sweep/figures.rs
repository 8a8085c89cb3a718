use super::{
    derive_seed, run_sweep, FixedParams, Grid, SweepMethod, SweepSpec, SweepTable, SweepVariable,
    Units,
};
use crate::error::{Error, Result};
use crate::estimators::MonteCarloSpec;

/// SNR for presets whose caption gives none.
pub const FIGURE_SNR_DB: f64 = 10.0;

/// A figure preset: several series swept over the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub number: u32,
    pub title: &'static str,
    /// `(label, spec)`; output columns are `<method>.<label>`.
    pub series: Vec<(String, SweepSpec)>,
}

fn series(
    label: String,
    variable: SweepVariable,
    grid: Grid,
    fixed: FixedParams,
    methods: &[SweepMethod],
    mc: MonteCarloSpec,
    units: Units,
) -> (String, SweepSpec) {
    let spec = SweepSpec {
        variable,
        grid,
        fixed,
        methods: methods.to_vec(),
        mc,
        units,
    };
    (label, spec)
}

fn fixed(n_t: usize, n_r: usize, kappa: f64, snr_db: f64) -> FixedParams {
    FixedParams {
        n_t,
        n_r,
        kappa,
        snr_db,
    }
}

fn antennas(max: usize) -> Grid {
    Grid::Range {
        start: 1.0,
        stop: max as f64,
        steps: max,
    }
}

/// Preset `n ∈ 1..=9`. Each series gets its own seed derived from `mc.seed()`.
pub fn figure(n: u32, mc: MonteCarloSpec, units: Units) -> Result<Figure> {
    use SweepMethod::*;
    let mc_for = |i: usize| mc.with_seed(derive_seed(mc.seed(), i as u64));
    let fig = match n {
        1 | 2 => {
            let snr = if n == 1 { 0.0 } else { 10.0 };
            let kappa_grid = Grid::Range {
                start: 0.0,
                stop: 20.0,
                steps: 41,
            };
            Figure {
                number: n,
                title: "asymptotic capacity for many transmit antennas versus Rician factor",
                series: [1usize, 2, 4, 8]
                    .iter()
                    .enumerate()
                    .map(|(i, &nr)| {
                        series(
                            format!("n_r={nr}"),
                            SweepVariable::Kappa,
                            kappa_grid.clone(),
                            fixed(1, nr, 0.0, snr),
                            &[Asymptotic],
                            mc_for(i),
                            units,
                        )
                    })
                    .collect(),
            }
        }
        3 => Figure {
            number: 3,
            title: "asymptotic capacity for many transmit antennas versus receive antennas",
            series: vec![series(
                "kappa=10".into(),
                SweepVariable::NR,
                antennas(32),
                fixed(1, 1, 10.0, FIGURE_SNR_DB),
                &[Asymptotic],
                mc_for(0),
                units,
            )],
        },
        4..=7 => {
            let kappa = if n.is_multiple_of(2) { 1.0 } else { 10.0 };
            let (variable, title, base) = if n <= 5 {
                (
                    SweepVariable::NR,
                    "single transmit antenna capacity versus receive antennas",
                    fixed(1, 1, 0.0, FIGURE_SNR_DB),
                )
            } else {
                (
                    SweepVariable::NT,
                    "single receive antenna capacity versus transmit antennas",
                    fixed(1, 1, 0.0, FIGURE_SNR_DB),
                )
            };
            Figure {
                number: n,
                title,
                series: [0.0, kappa]
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| {
                        series(
                            format!("kappa={k}"),
                            variable,
                            antennas(16),
                            FixedParams { kappa: k, ..base },
                            &[QuadM1, UpperBound],
                            mc_for(i),
                            units,
                        )
                    })
                    .collect(),
            }
        }
        8 | 9 => {
            let kappa = if n == 8 { 1.0 } else { 10.0 };
            Figure {
                number: n,
                title: "single receive antenna capacity with the Rician-weighted covariance",
                series: vec![series(
                    format!("kappa={kappa}"),
                    SweepVariable::NT,
                    antennas(16),
                    fixed(1, 1, kappa, FIGURE_SNR_DB),
                    &[
                        NewSchemeMc,
                        NewSchemeUb,
                        NewSchemeLb,
                        NewSchemeApprox,
                        QuadM1,
                        UpperBound,
                    ],
                    mc_for(0),
                    units,
                )],
            }
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "no figure preset {n} (expected 1 to 9)"
            )))
        }
    };
    Ok(fig)
}

/// Runs every series and joins them column-wise on the shared grid.
pub fn run_figure(fig: &Figure) -> Result<SweepTable> {
    let mut joined: Option<SweepTable> = None;
    for (label, spec) in &fig.series {
        let mut t = run_sweep(spec)?;
        t.columns = t.columns.iter().map(|c| format!("{c}.{label}")).collect();
        joined = Some(match joined {
            None => t,
            Some(mut acc) => {
                if acc.rows.len() != t.rows.len()
                    || acc
                        .rows
                        .iter()
                        .zip(&t.rows)
                        .any(|(a, b)| a.value != b.value)
                {
                    return Err(Error::InvalidParameter(
                        "figure series must share one grid".into(),
                    ));
                }
                acc.columns.extend(t.columns);
                for (a, b) in acc.rows.iter_mut().zip(t.rows) {
                    a.cells.extend(b.cells);
                }
                acc
            }
        });
    }
    joined.ok_or_else(|| Error::InvalidParameter("figure has no series".into()))
}
