use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ricecap::estimators::MonteCarloSpec;
use ricecap::sweep::{
    emit_csv, figure, run_figure, run_sweep, write_csv, FixedParams, Grid, McConfig, SweepConfig,
    SweepMethod, SweepSpec, SweepTable, SweepVariable, Units,
};
use ricecap::{Error, Result};

/// Ergodic capacity of Rician MIMO channels with receiver-only channel
/// knowledge. Writes CSV to stdout or `--out`.
#[derive(Debug, Parser)]
#[command(name = "ricecap", version)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Transmit antennas
    #[arg(long, global = true)]
    nt: Option<usize>,

    /// Receive antennas
    #[arg(long, global = true)]
    nr: Option<usize>,

    /// Rician factor
    #[arg(long, global = true)]
    kappa: Option<f64>,

    /// Total transmit SNR in dB
    #[arg(long = "snr-db", global = true, allow_negative_numbers = true)]
    snr_db: Option<f64>,

    /// Method; meaning depends on the subcommand
    #[arg(long, global = true)]
    method: Option<String>,

    /// Monte Carlo samples per point
    #[arg(long, global = true)]
    samples: Option<usize>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte Carlo shards (one random stream each)
    #[arg(long, global = true)]
    shards: Option<usize>,

    /// nats or bits
    #[arg(long, global = true)]
    units: Option<String>,

    /// Write CSV here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// TOML file with sweep, channel and Monte Carlo settings
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed form: upper_bound (default), deterministic or asymptotic
    Bound,
    /// Exact capacity with Q = (P/N_T) I: mc (default) or quad (needs min(N_T, N_R) = 1)
    Capacity,
    /// Rician-weighted covariance, N_R = 1: mc, ub, lb, approx or all (default)
    NewScheme,
    /// Sweep one parameter over a grid
    Sweep {
        /// kappa, n_t, n_r or power_db
        #[arg(long)]
        variable: Option<String>,

        /// `a,b,c` or `start:stop:steps`
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,

        /// Comma-separated methods
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
    },
    /// Reproduce figure N (1 to 9)
    Figure { n: u32 },
}

struct Resolved {
    fixed: FixedParams,
    mc: MonteCarloSpec,
    units: Units,
    config: SweepConfig,
}

fn resolve(opts: &GlobalOpts) -> Result<Resolved> {
    let config = match &opts.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::default(),
    };
    let fixed = config.fixed.apply(FixedParams::default());
    let fixed = FixedParams {
        n_t: opts.nt.unwrap_or(fixed.n_t),
        n_r: opts.nr.unwrap_or(fixed.n_r),
        kappa: opts.kappa.unwrap_or(fixed.kappa),
        snr_db: opts.snr_db.unwrap_or(fixed.snr_db),
    };
    let flags = McConfig {
        samples: opts.samples,
        seed: opts.seed,
        shards: opts.shards,
        confidence: None,
    };
    let mc = config
        .mc
        .overridden_by(&flags)
        .apply(MonteCarloSpec::default())?;
    let units = match &opts.units {
        Some(u) => u.parse()?,
        None => config.units.unwrap_or_default(),
    };
    Ok(Resolved {
        fixed,
        mc,
        units,
        config,
    })
}

fn single_point(r: &Resolved, methods: Vec<SweepMethod>) -> Result<SweepTable> {
    run_sweep(&SweepSpec {
        variable: SweepVariable::Kappa,
        grid: Grid::List(vec![r.fixed.kappa]),
        fixed: r.fixed,
        methods,
        mc: r.mc,
        units: r.units,
    })
}

fn pick(
    method: Option<&str>,
    default: &str,
    choices: &[(&str, &[SweepMethod])],
) -> Result<Vec<SweepMethod>> {
    let key = method.unwrap_or(default);
    choices
        .iter()
        .find(|(name, _)| *name == key)
        .map(|(_, m)| m.to_vec())
        .ok_or_else(|| {
            let names: Vec<&str> = choices.iter().map(|(n, _)| *n).collect();
            Error::InvalidParameter(format!(
                "unknown method '{key}' (expected one of {})",
                names.join(", ")
            ))
        })
}

fn build_table(cli: &Cli) -> Result<SweepTable> {
    use SweepMethod::*;
    let r = resolve(&cli.opts)?;
    let method = cli.opts.method.as_deref();
    match &cli.command {
        Command::Bound => {
            let m = pick(
                method,
                "upper_bound",
                &[
                    ("upper_bound", &[UpperBound]),
                    ("deterministic", &[Deterministic]),
                    ("asymptotic", &[Asymptotic]),
                ],
            )?;
            single_point(&r, m)
        }
        Command::Capacity => {
            let m = pick(method, "mc", &[("mc", &[McIdentity]), ("quad", &[QuadM1])])?;
            single_point(&r, m)
        }
        Command::NewScheme => {
            let all: &[SweepMethod] = &[NewSchemeMc, NewSchemeUb, NewSchemeLb, NewSchemeApprox];
            let m = pick(
                method,
                "all",
                &[
                    ("all", all),
                    ("mc", &[NewSchemeMc]),
                    ("ub", &[NewSchemeUb]),
                    ("lb", &[NewSchemeLb]),
                    ("approx", &[NewSchemeApprox]),
                ],
            )?;
            single_point(&r, m)
        }
        Command::Sweep {
            variable,
            grid,
            methods,
        } => {
            let variable = match variable {
                Some(v) => v.parse()?,
                None => r
                    .config
                    .variable
                    .ok_or_else(|| Error::InvalidParameter("sweep needs --variable".into()))?,
            };
            let grid: Grid = match grid {
                Some(g) => g.parse()?,
                None => r
                    .config
                    .grid
                    .clone()
                    .ok_or_else(|| Error::InvalidParameter("sweep needs --grid".into()))?
                    .into(),
            };
            let methods: Vec<SweepMethod> = match (methods, method) {
                (Some(list), _) => list.iter().map(|s| s.parse()).collect::<Result<_>>()?,
                (None, Some(one)) => vec![one.parse()?],
                (None, None) => r.config.methods.clone().unwrap_or_default(),
            };
            run_sweep(&SweepSpec {
                variable,
                grid,
                fixed: r.fixed,
                methods,
                mc: r.mc,
                units: r.units,
            })
        }
        Command::Figure { n } => run_figure(&figure(*n, r.mc, r.units)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let table = match build_table(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("ricecap: {e}");
            return ExitCode::FAILURE;
        }
    };
    let written = match &cli.opts.out {
        Some(path) => write_csv(&table, path),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            match emit_csv(&table, &mut lock).and_then(|_| lock.flush()) {
                // a closed pipe means the reader has what it wanted
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                r => r,
            }
            .map_err(|e| Error::Io {
                path: "<stdout>".into(),
                message: e.to_string(),
            })
        }
    };
    if let Err(e) = written {
        eprintln!("ricecap: {e}");
        return ExitCode::FAILURE;
    }
    let failures = table.failures();
    if !failures.is_empty() {
        for f in &failures {
            eprintln!("ricecap: {f}");
        }
        eprintln!("ricecap: {} value(s) marked ERR", failures.len());
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
