//! Outage curves of SDF and the reference protocols over an alpha grid.

use std::fmt;
use std::str::FromStr;

use sdf_core::{
    as_outage_series, baf_outage_series, cutset_bound_series, derive_seed, estimate_outage,
    mutual_info_sdf, sdf_outage_exact, sdf_outage_leading, sdf_outage_series, split_outage_exact,
    ChannelStats, LinkBudget, PowerSplit,
};

use crate::config::check_alpha_grid;
use crate::table::{Cell, Table};
use crate::HarnessError;

/// Rate used to realise `epsilon = alpha` in alpha mode; the thresholds do
/// not depend on it.
pub const NOMINAL_RATE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Curve {
    SdfExact,
    SdfSeries,
    SdfLeading,
    BafSeries,
    AsSeries,
    BoundSeries,
    SdfMc,
    SplitExact,
}

impl Curve {
    pub const ALL: [Curve; 8] = [
        Curve::SdfExact,
        Curve::SdfSeries,
        Curve::SdfLeading,
        Curve::BafSeries,
        Curve::AsSeries,
        Curve::BoundSeries,
        Curve::SdfMc,
        Curve::SplitExact,
    ];

    pub const ANALYTIC: [Curve; 6] = [
        Curve::SdfExact,
        Curve::SdfSeries,
        Curve::SdfLeading,
        Curve::BafSeries,
        Curve::AsSeries,
        Curve::BoundSeries,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Curve::SdfExact => "sdf_exact",
            Curve::SdfSeries => "sdf_series",
            Curve::SdfLeading => "sdf_leading",
            Curve::BafSeries => "baf_series",
            Curve::AsSeries => "as_series",
            Curve::BoundSeries => "bound_series",
            Curve::SdfMc => "sdf_mc",
            Curve::SplitExact => "split_exact",
        }
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Curve {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Curve::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Curve::ALL.iter().map(|c| c.name()).collect();
                format!("unknown curve {s:?}, expected one of {}", names.join(", "))
            })
    }
}

/// How the exact threshold relates to the grid value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsMode {
    /// `epsilon = alpha`, the `R -> 0` limit at fixed alpha.
    Alpha,
    /// Fixed rate `R`; each grid point sets `rho = 2R / alpha`.
    Explicit,
}

impl EpsMode {
    pub fn name(self) -> &'static str {
        match self {
            EpsMode::Alpha => "alpha",
            EpsMode::Explicit => "explicit",
        }
    }
}

impl FromStr for EpsMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alpha" => Ok(EpsMode::Alpha),
            "explicit" => Ok(EpsMode::Explicit),
            _ => Err(format!(
                "unknown eps mode {s:?}, expected alpha or explicit"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub alpha_grid: Vec<f64>,
    pub stats: ChannelStats,
    /// Monte Carlo trials per row; 0 means analytic curves only.
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub curves: Vec<Curve>,
    pub eps_mode: EpsMode,
    /// Used only in explicit mode.
    pub rate: f64,
    pub split: PowerSplit,
}

impl SweepSpec {
    /// Analytic-only sweep over `alpha_grid` with unit-mean links.
    pub fn analytic(alpha_grid: Vec<f64>, curves: Vec<Curve>) -> Self {
        Self {
            alpha_grid,
            stats: ChannelStats::unit(),
            trials: 0,
            seed: crate::config::DEFAULT_SEED,
            workers: crate::config::DEFAULT_WORKERS,
            curves,
            eps_mode: EpsMode::Alpha,
            rate: NOMINAL_RATE,
            split: sdf_core::optimal_split_closed(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        check_alpha_grid(&self.alpha_grid)?;
        if self.curves.is_empty() {
            return Err(HarnessError::Config("no curves requested".into()));
        }
        if self.curves.contains(&Curve::SdfMc) && self.trials < sdf_core::protocol::MIN_TRIALS {
            return Err(HarnessError::Config(format!(
                "sdf_mc needs --trials >= {}, got {}",
                sdf_core::protocol::MIN_TRIALS,
                self.trials
            )));
        }
        if self.workers == 0 {
            return Err(HarnessError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn budget(&self, alpha: f64) -> Result<LinkBudget, HarnessError> {
        let b = match self.eps_mode {
            EpsMode::Alpha => LinkBudget::for_epsilon(alpha, NOMINAL_RATE),
            EpsMode::Explicit => LinkBudget::new(self.rate, 2.0 * self.rate / alpha),
        };
        b.map_err(|e| HarnessError::Config(e.to_string()))
    }

    fn columns(&self) -> Vec<String> {
        let mut cols = vec!["alpha".to_string(), "epsilon".to_string()];
        for c in &self.curves {
            cols.push(c.name().to_string());
            if *c == Curve::SdfMc {
                for suffix in ["stderr", "ci95_low", "ci95_high"] {
                    cols.push(format!("sdf_mc_{suffix}"));
                }
            }
        }
        cols
    }
}

/// One row per alpha, one column per requested curve (plus the Monte Carlo
/// interval columns). Fails with a domain error if any analytic value is
/// outside its formula's domain.
pub fn run_compare(spec: &SweepSpec) -> Result<Table, HarnessError> {
    spec.validate()?;
    let mut table = Table::new(spec.columns());
    table.push_meta("command", "compare");
    table.push_meta("eps_mode", spec.eps_mode.name());
    if spec.eps_mode == EpsMode::Explicit {
        table.push_meta("rate", spec.rate);
    }
    table.push_meta("sigma_sd", spec.stats.sigma_sd());
    table.push_meta("sigma_rd", spec.stats.sigma_rd());
    table.push_meta("sigma_sr", spec.stats.sigma_sr());
    if spec.curves.contains(&Curve::SplitExact) {
        table.push_meta("split", spec.split.value());
    }
    if spec.curves.contains(&Curve::SdfMc) {
        table.push_meta("trials", spec.trials);
        table.push_meta("workers", spec.workers);
    }

    let mut bad = Vec::new();
    for (i, &alpha) in spec.alpha_grid.iter().enumerate() {
        let budget = spec.budget(alpha)?;
        let mut row: Vec<Cell> = vec![alpha.into(), budget.epsilon().into()];
        for &curve in &spec.curves {
            let value = match curve {
                Curve::SdfExact => sdf_outage_exact(&budget, &spec.stats),
                Curve::SdfSeries => sdf_outage_series(alpha),
                Curve::SdfLeading => sdf_outage_leading(alpha),
                Curve::BafSeries if alpha < 1.0 => baf_outage_series(alpha).unwrap_or(f64::NAN),
                Curve::BafSeries => f64::NAN,
                Curve::AsSeries => as_outage_series(alpha),
                Curve::BoundSeries => cutset_bound_series(alpha),
                Curve::SplitExact => split_outage_exact(&budget, &spec.stats, spec.split),
                Curve::SdfMc => {
                    let est = estimate_outage(
                        mutual_info_sdf,
                        &spec.stats,
                        &budget,
                        spec.trials,
                        derive_seed(spec.seed, i as u64),
                        spec.workers,
                    )
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
                    row.extend([
                        est.p_hat.into(),
                        est.stderr.into(),
                        est.ci95_low.into(),
                        est.ci95_high.into(),
                    ]);
                    continue;
                }
            };
            let exact = matches!(curve, Curve::SdfExact | Curve::SplitExact);
            if !value.is_finite() || (exact && !(0.0..=1.0).contains(&value)) {
                bad.push(format!("{curve} at alpha={alpha}"));
            }
            row.push(value.into());
        }
        table.push_row(row);
    }

    if bad.is_empty() {
        Ok(table)
    } else {
        Err(HarnessError::Domain(format!(
            "outside formula domain: {}",
            bad.join("; ")
        )))
    }
}
