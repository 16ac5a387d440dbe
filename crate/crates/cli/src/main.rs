use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sdf_cli::config::{self, parse_alpha_list, parse_curve_list, SeedSource, Settings, SEED_ENV};
use sdf_cli::optimize::{optimize_table, DEFAULT_MC_TRIALS, DEFAULT_OPTIMIZE_ALPHA, DEFAULT_TOL};
use sdf_cli::validate::validate_table;
use sdf_cli::{
    exit, run_compare, run_optimize, run_validate, Curve, HarnessError, OptimizeMode, OptimizeSpec,
    SweepSpec, Table,
};

/// Outage curves, power-split optimisation and Monte Carlo validation for
/// selection decode-and-forward relaying at low SNR.
#[derive(Parser, Debug)]
#[command(name = "sdf-relay", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate outage curves over an alpha grid
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Curves to emit (sdf_exact, sdf_series, sdf_leading, baf_series,
        /// as_series, bound_series, sdf_mc, split_exact)
        #[arg(long)]
        curves: Option<String>,
        /// Power split used by split_exact (default: the closed-form optimum)
        #[arg(long)]
        split: Option<f64>,
    },
    /// Optimise the fraction of energy spent in the direct slot
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
        /// closed, numeric-leading, numeric-exact or numeric-mc
        #[arg(long)]
        mode: Option<String>,
        /// Bracket width at which the search stops
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Cross-check closed forms against each other and against Monte Carlo
    Validate {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Comma-separated alphas, or log:<lo>:<hi>:<n>
    #[arg(long)]
    alphas: Option<String>,
    #[arg(long)]
    sigma_sd: Option<f64>,
    #[arg(long)]
    sigma_rd: Option<f64>,
    #[arg(long)]
    sigma_sr: Option<f64>,
    /// Monte Carlo trials per cell
    #[arg(long)]
    trials: Option<u64>,
    /// Base seed (falls back to $SDF_RELAY_SEED)
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo partitions, each with its own random stream
    #[arg(long)]
    workers: Option<usize>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<String>,
    /// Flat key = value file; flags override it
    #[arg(long)]
    config: Option<String>,
    /// alpha (epsilon = alpha) or explicit (uses --rate, optionally --rho)
    #[arg(long)]
    eps_mode: Option<String>,
    /// Target rate R in nats, for explicit mode
    #[arg(long)]
    rate: Option<f64>,
    /// SNR, for explicit mode; collapses the grid to alpha = 2R/rho
    #[arg(long)]
    rho: Option<f64>,
}

fn config_err(msg: String) -> HarnessError {
    HarnessError::Config(msg)
}

impl CommonArgs {
    fn settings(&self) -> Result<Settings, HarnessError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| HarnessError::Config(format!("cannot read {path}: {e}")))?;
                Settings::from_config_str(&text)?
            }
            None => Settings::default(),
        };
        let flags = Settings {
            alphas: self
                .alphas
                .as_deref()
                .map(parse_alpha_list)
                .transpose()
                .map_err(config_err)?,
            sigma_sd: self.sigma_sd,
            sigma_rd: self.sigma_rd,
            sigma_sr: self.sigma_sr,
            trials: self.trials,
            seed: self.seed.map(|s| (s, SeedSource::Flag)),
            workers: self.workers,
            format: self
                .format
                .as_deref()
                .map(str::parse)
                .transpose()
                .map_err(config_err)?,
            out: self.out.clone(),
            eps_mode: self
                .eps_mode
                .as_deref()
                .map(str::parse)
                .transpose()
                .map_err(config_err)?,
            rate: self.rate,
            rho: self.rho,
            ..Settings::default()
        };
        Ok(file.overlay(flags))
    }
}

/// Report plus the exit code it implies.
fn execute(cli: Cli) -> Result<(String, Option<String>, i32), HarnessError> {
    let env_seed = std::env::var(SEED_ENV).ok();
    let (settings, mut table, code) = match cli.command {
        Command::Compare {
            common,
            curves,
            split,
        } => {
            let mut s = common.settings()?;
            if let Some(c) = curves {
                s.curves = Some(parse_curve_list(&c).map_err(config_err)?);
            }
            if split.is_some() {
                s.split = split;
            }
            let (grid, eps_mode) = s.grid_and_mode()?;
            let trials = s.trials.unwrap_or(0);
            let curves = s.curves.clone().unwrap_or_else(|| {
                let mut c = Curve::ANALYTIC.to_vec();
                if trials > 0 {
                    c.push(Curve::SdfMc);
                }
                c
            });
            let (seed, source) = s.resolve_seed(env_seed.as_deref())?;
            let spec = SweepSpec {
                alpha_grid: grid,
                stats: s.stats()?,
                trials,
                seed,
                workers: s.workers()?,
                curves,
                eps_mode,
                rate: s.rate.unwrap_or(sdf_cli::compare::NOMINAL_RATE),
                split: s.split()?,
            };
            let mut t = run_compare(&spec)?;
            stamp_seed(&mut t, seed, source);
            (s, t, exit::SUCCESS)
        }
        Command::Optimize { common, mode, tol } => {
            let mut s = common.settings()?;
            if let Some(m) = mode {
                s.mode = Some(m.parse().map_err(config_err)?);
            }
            if tol.is_some() {
                s.tol = tol;
            }
            if s.alphas.is_none() && s.rho.is_none() {
                s.alphas = Some(vec![DEFAULT_OPTIMIZE_ALPHA]);
            }
            let (grid, eps_mode) = s.grid_and_mode()?;
            let (seed, source) = s.resolve_seed(env_seed.as_deref())?;
            let spec = OptimizeSpec {
                alphas: grid,
                stats: s.stats()?,
                mode: s.mode.unwrap_or(OptimizeMode::Closed),
                tol: s.tol.unwrap_or(DEFAULT_TOL),
                seed,
                trials: s.trials.unwrap_or(DEFAULT_MC_TRIALS),
                workers: s.workers()?,
                eps_mode,
                rate: s.rate.unwrap_or(sdf_cli::compare::NOMINAL_RATE),
            };
            let reports = run_optimize(&spec)?;
            let mut t = optimize_table(&spec, &reports);
            if spec.mode == OptimizeMode::NumericMc {
                stamp_seed(&mut t, seed, source);
            }
            (s, t, exit::SUCCESS)
        }
        Command::Validate { common } => {
            let s = common.settings()?;
            let (seed, source) = s.resolve_seed(env_seed.as_deref())?;
            let report = run_validate(s.trials.unwrap_or(1_000_000), seed, s.workers()?)?;
            let mut t = validate_table(&report);
            stamp_seed(&mut t, seed, source);
            let code = if report.passed {
                exit::SUCCESS
            } else {
                exit::VALIDATION_FAILED
            };
            (s, t, code)
        }
    };
    table.meta.insert(0, ("tool".into(), "sdf-relay".into()));
    let format = settings.format.unwrap_or_default();
    Ok((table.render(format), settings.out, code))
}

fn stamp_seed(t: &mut Table, seed: u64, source: SeedSource) {
    t.push_meta("seed", seed);
    t.push_meta("seed_source", source.as_str());
    if source == SeedSource::Env {
        t.push_meta("seed_env", config::SEED_ENV);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok((report, out, code)) => {
            let written = match out {
                Some(path) => fs::write(&path, report),
                None => std::io::stdout().write_all(report.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("sdf-relay: {e}");
                return ExitCode::from(exit::IO as u8);
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("sdf-relay: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
