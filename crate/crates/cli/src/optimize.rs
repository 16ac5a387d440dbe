//! Power-split optimisation runs.

use std::str::FromStr;

use sdf_core::energy::DEFAULT_BRACKET;
use sdf_core::{
    estimate_outage, mutual_info_sdf_split, optimal_split_closed, optimal_split_numeric,
    split_outage_exact, split_outage_leading, ChannelStats, OptimizationResult, BOUND_OPTIMUM,
};

use crate::compare::{EpsMode, SweepSpec};
use crate::config::check_alpha_grid;
use crate::table::Table;
use crate::HarnessError;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MC_TRIALS: u64 = 1_000_000;
pub const DEFAULT_OPTIMIZE_ALPHA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeMode {
    /// `(3 - sqrt 3) / 2`.
    Closed,
    /// Golden-section search over the leading-order objective.
    NumericLeading,
    /// Golden-section search over the exact split outage.
    NumericExact,
    /// Golden-section search over a Monte Carlo estimate with common random
    /// numbers across evaluations.
    NumericMc,
}

impl OptimizeMode {
    pub fn name(self) -> &'static str {
        match self {
            OptimizeMode::Closed => "closed",
            OptimizeMode::NumericLeading => "numeric-leading",
            OptimizeMode::NumericExact => "numeric-exact",
            OptimizeMode::NumericMc => "numeric-mc",
        }
    }
}

impl FromStr for OptimizeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed" => Ok(OptimizeMode::Closed),
            "numeric-leading" => Ok(OptimizeMode::NumericLeading),
            "numeric-exact" => Ok(OptimizeMode::NumericExact),
            "numeric-mc" => Ok(OptimizeMode::NumericMc),
            _ => Err(format!(
                "unknown mode {s:?}, expected closed, numeric-leading, numeric-exact or numeric-mc"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeSpec {
    pub alphas: Vec<f64>,
    pub stats: ChannelStats,
    pub mode: OptimizeMode,
    pub tol: f64,
    pub seed: u64,
    pub trials: u64,
    pub workers: usize,
    pub eps_mode: EpsMode,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeReport {
    pub alpha: f64,
    pub epsilon: f64,
    pub result: OptimizationResult,
}

impl OptimizeReport {
    pub fn delta_closed(&self) -> f64 {
        self.result.x_star.value() - optimal_split_closed().value()
    }

    pub fn delta_bound(&self) -> f64 {
        self.result.x_star.value() - BOUND_OPTIMUM
    }
}

pub fn run_optimize(spec: &OptimizeSpec) -> Result<Vec<OptimizeReport>, HarnessError> {
    check_alpha_grid(&spec.alphas)?;
    if spec.tol.is_nan() || spec.tol <= 0.0 {
        return Err(HarnessError::Config(format!(
            "tol must be positive, got {}",
            spec.tol
        )));
    }
    let sweep = SweepSpec {
        alpha_grid: spec.alphas.clone(),
        stats: spec.stats,
        trials: spec.trials,
        seed: spec.seed,
        workers: spec.workers,
        curves: vec![],
        eps_mode: spec.eps_mode,
        rate: spec.rate,
        split: optimal_split_closed(),
    };
    let core_err = |e: sdf_core::Error| HarnessError::Config(e.to_string());

    spec.alphas
        .iter()
        .map(|&alpha| {
            let budget = sweep.budget(alpha)?;
            let result = match spec.mode {
                OptimizeMode::Closed => {
                    let x = optimal_split_closed();
                    OptimizationResult {
                        x_star: x,
                        objective_at_star: split_outage_leading(alpha, x),
                        iterations: 0,
                        converged: true,
                    }
                }
                OptimizeMode::NumericLeading => optimal_split_numeric(
                    |s| split_outage_leading(alpha, s),
                    DEFAULT_BRACKET,
                    spec.tol,
                )
                .map_err(core_err)?,
                OptimizeMode::NumericExact => optimal_split_numeric(
                    |s| split_outage_exact(&budget, &spec.stats, s),
                    DEFAULT_BRACKET,
                    spec.tol,
                )
                .map_err(core_err)?,
                OptimizeMode::NumericMc => {
                    if spec.trials < sdf_core::protocol::MIN_TRIALS {
                        return Err(HarnessError::Config(format!(
                            "numeric-mc needs --trials >= {}",
                            sdf_core::protocol::MIN_TRIALS
                        )));
                    }
                    let objective = |s| {
                        estimate_outage(
                            |r, b| mutual_info_sdf_split(r, b, s),
                            &spec.stats,
                            &budget,
                            spec.trials,
                            spec.seed,
                            spec.workers,
                        )
                        .map(|e| e.p_hat)
                        .unwrap_or(f64::INFINITY)
                    };
                    optimal_split_numeric(objective, DEFAULT_BRACKET, spec.tol).map_err(core_err)?
                }
            };
            Ok(OptimizeReport {
                alpha,
                epsilon: budget.epsilon(),
                result,
            })
        })
        .collect()
}

pub fn optimize_table(spec: &OptimizeSpec, reports: &[OptimizeReport]) -> Table {
    let cols = [
        "alpha",
        "epsilon",
        "x_star",
        "objective",
        "iterations",
        "converged",
        "x_closed",
        "delta_closed",
        "x_bound",
        "delta_bound",
    ];
    let mut t = Table::new(cols.iter().map(|c| c.to_string()).collect());
    t.push_meta("command", "optimize");
    t.push_meta("mode", spec.mode.name());
    t.push_meta("eps_mode", spec.eps_mode.name());
    t.push_meta("tol", spec.tol);
    t.push_meta("sigma_sd", spec.stats.sigma_sd());
    t.push_meta("sigma_rd", spec.stats.sigma_rd());
    t.push_meta("sigma_sr", spec.stats.sigma_sr());
    if spec.mode == OptimizeMode::NumericMc {
        t.push_meta("trials", spec.trials);
        t.push_meta("workers", spec.workers);
    }
    for r in reports {
        t.push_row(vec![
            r.alpha.into(),
            r.epsilon.into(),
            r.result.x_star.value().into(),
            r.result.objective_at_star.into(),
            u64::from(r.result.iterations).into(),
            r.result.converged.into(),
            optimal_split_closed().value().into(),
            r.delta_closed().into(),
            BOUND_OPTIMUM.into(),
            r.delta_bound().into(),
        ]);
    }
    t
}
