//! Cross-validation of the closed forms against each other and against
//! Monte Carlo.

use sdf_core::analytic::verify_series_order;
use sdf_core::energy::DEFAULT_BRACKET;
use sdf_core::{
    as_outage_series, baf_outage_series, cutset_bound_series, derive_seed, estimate_outage,
    mutual_info_combined, mutual_info_sdf, mutual_info_sdf_split, optimal_split_closed,
    optimal_split_numeric, sdf_outage_exact_eps, sdf_outage_leading, sdf_outage_series,
    split_outage_exact_eps, split_outage_leading, sum_exp_cdf, ChannelStats, LinkBudget,
    OutageEstimate, PowerSplit, BOUND_OPTIMUM,
};

use crate::compare::NOMINAL_RATE;
use crate::config::default_alpha_grid;
use crate::table::Table;
use crate::HarnessError;

pub const MIN_VALIDATE_TRIALS: u64 = 100_000;
/// Monte Carlo cells must land within this many standard errors.
pub const MC_SIGMAS: f64 = 3.0;
/// Fraction of Monte Carlo cells that must pass.
pub const MC_COVERAGE: f64 = 0.95;

/// Which outage event a Monte Carlo cell estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McTarget {
    Sdf,
    Split(PowerSplit),
    /// Relay always forwards: the event `g1 + g2 < epsilon`.
    SumExp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McCell {
    pub epsilon: f64,
    pub stats: ChannelStats,
    pub target: McTarget,
}

impl McCell {
    fn new(epsilon: f64, (sd, rd, sr): (f64, f64, f64), target: McTarget) -> Self {
        Self {
            epsilon,
            stats: ChannelStats::new(sd, rd, sr).expect("grid stats are positive"),
            target,
        }
    }

    pub fn name(&self) -> String {
        let kind = match self.target {
            McTarget::Sdf => "sdf".to_string(),
            McTarget::Split(x) => format!("split(x={})", x.value()),
            McTarget::SumExp => "sum_exp".to_string(),
        };
        format!(
            "mc/{kind}/eps={}/sigma={},{},{}",
            self.epsilon,
            self.stats.sigma_sd(),
            self.stats.sigma_rd(),
            self.stats.sigma_sr()
        )
    }

    pub fn analytic(&self) -> f64 {
        match self.target {
            McTarget::Sdf => sdf_outage_exact_eps(self.epsilon, &self.stats).unwrap(),
            McTarget::Split(x) => split_outage_exact_eps(self.epsilon, &self.stats, x).unwrap(),
            McTarget::SumExp => {
                sum_exp_cdf(self.epsilon, self.stats.sigma_sd(), self.stats.sigma_rd()).unwrap()
            }
        }
    }

    pub fn estimate(
        &self,
        trials: u64,
        seed: u64,
        workers: usize,
    ) -> Result<OutageEstimate, sdf_core::Error> {
        let budget = LinkBudget::for_epsilon(self.epsilon, NOMINAL_RATE)?;
        match self.target {
            McTarget::Sdf => {
                estimate_outage(mutual_info_sdf, &self.stats, &budget, trials, seed, workers)
            }
            McTarget::Split(x) => estimate_outage(
                |r, b| mutual_info_sdf_split(r, b, x),
                &self.stats,
                &budget,
                trials,
                seed,
                workers,
            ),
            McTarget::SumExp => estimate_outage(
                mutual_info_combined,
                &self.stats,
                &budget,
                trials,
                seed,
                workers,
            ),
        }
    }
}

/// Twenty `(epsilon, variances, split)` configurations.
pub fn default_mc_grid() -> Vec<McCell> {
    let unit = (1.0, 1.0, 1.0);
    let x_opt = McTarget::Split(optimal_split_closed());
    let split = |x: f64| McTarget::Split(PowerSplit::new(x).unwrap());
    vec![
        McCell::new(0.05, unit, McTarget::Sdf),
        McCell::new(0.1, unit, McTarget::Sdf),
        McCell::new(0.3, unit, McTarget::Sdf),
        McCell::new(0.5, unit, McTarget::Sdf),
        McCell::new(0.1, (2.0, 0.5, 1.0), McTarget::Sdf),
        McCell::new(0.2, (0.5, 1.0, 3.0), McTarget::Sdf),
        McCell::new(0.3, (1.0, 2.0, 0.5), McTarget::Sdf),
        McCell::new(0.1, (1.0, 1.0, 4.0), McTarget::Sdf),
        McCell::new(0.1, unit, x_opt),
        McCell::new(0.3, unit, x_opt),
        McCell::new(0.05, unit, split(0.5)),
        McCell::new(0.1, unit, split(0.3)),
        McCell::new(0.3, unit, split(0.8)),
        McCell::new(0.2, (2.0, 0.5, 1.0), split(0.4)),
        McCell::new(0.2, (0.5, 2.0, 1.0), split(0.7)),
        McCell::new(0.5, (1.0, 1.0, 2.0), split(0.6)),
        McCell::new(0.1, unit, McTarget::SumExp),
        McCell::new(0.3, (2.0, 1.0, 1.0), McTarget::SumExp),
        McCell::new(0.5, (0.5, 3.0, 1.0), McTarget::SumExp),
        McCell::new(1.0, (1.0, 1.5, 1.0), McTarget::SumExp),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub group: &'static str,
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn within(group: &'static str, name: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            group,
            name: name.to_string(),
            value,
            expected,
            tolerance,
            pass: (value - expected).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub passed: bool,
}

/// `(alpha^2 - exact) / alpha^3`, extrapolated from `alpha` and `alpha/10`.
pub fn richardson_alpha3_coefficient(alpha: f64) -> f64 {
    let c = |a: f64| (a * a - sdf_outage_exact_eps(a, &ChannelStats::unit()).unwrap()) / a.powi(3);
    (10.0 * c(alpha / 10.0) - c(alpha)) / 9.0
}

/// Deterministic checks that need no sampling.
pub fn analytic_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let exact = |a: f64| sdf_outage_exact_eps(a, &ChannelStats::unit()).unwrap();
    let alphas = [1e-1, 1e-2, 1e-3];

    let rep = verify_series_order(exact, sdf_outage_series, &alphas, 4).expect("three alphas");
    checks.push(Check::within(
        "analytic",
        "series_order_third",
        rep.slope.unwrap_or(f64::NAN),
        4.0,
        0.2,
    ));
    let rep = verify_series_order(exact, sdf_outage_leading, &alphas, 3).expect("three alphas");
    checks.push(Check::within(
        "analytic",
        "series_order_leading",
        rep.slope.unwrap_or(f64::NAN),
        3.0,
        0.2,
    ));

    let target = 29.0 / 24.0;
    checks.push(Check::within(
        "analytic",
        "alpha3_coefficient",
        richardson_alpha3_coefficient(1e-2),
        target,
        0.01 * target,
    ));
    checks.push(Check::within(
        "analytic",
        "leading_ratio_at_1e-3",
        exact(1e-3) / sdf_outage_leading(1e-3),
        1.0,
        0.005,
    ));

    let x_closed = optimal_split_closed().value();
    let numeric = optimal_split_numeric(|s| split_outage_leading(0.1, s), DEFAULT_BRACKET, 1e-6)
        .expect("valid bracket");
    checks.push(Check::within(
        "energy",
        "split_numeric_vs_closed",
        numeric.x_star.value(),
        x_closed,
        1e-6,
    ));
    checks.push(Check::within(
        "energy",
        "split_closed",
        x_closed,
        0.633_974_6,
        1e-7,
    ));
    checks.push(Check::within(
        "energy",
        "bound_optimum_gap",
        BOUND_OPTIMUM - x_closed,
        0.0327,
        1e-3,
    ));
    checks.push(Check::within(
        "energy",
        "split_gain",
        split_outage_leading(1.0, optimal_split_closed()),
        (2.0 + 3f64.sqrt()) / 4.0,
        1e-6,
    ));

    let violations = default_alpha_grid()
        .into_iter()
        .filter(|&a| {
            let sdf = sdf_outage_series(a);
            let bound = cutset_bound_series(a);
            !(sdf < bound && bound < as_outage_series(a) && sdf < baf_outage_series(a).unwrap())
        })
        .count();
    checks.push(Check::within(
        "analytic",
        "curve_ordering_violations",
        violations as f64,
        0.0,
        0.0,
    ));
    checks
}

pub fn run_validate(
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<ValidationReport, HarnessError> {
    if trials < MIN_VALIDATE_TRIALS {
        return Err(HarnessError::Config(format!(
            "validate needs --trials >= {MIN_VALIDATE_TRIALS}, got {trials}"
        )));
    }
    if workers == 0 {
        return Err(HarnessError::Config("workers must be at least 1".into()));
    }
    let mut checks = analytic_checks();
    let grid = default_mc_grid();
    let mut cell_passes = 0;
    for (i, cell) in grid.iter().enumerate() {
        let est = cell
            .estimate(trials, derive_seed(seed, i as u64), workers)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let check = Check::within(
            "mc",
            &cell.name(),
            est.p_hat,
            cell.analytic(),
            MC_SIGMAS * est.stderr,
        );
        cell_passes += usize::from(check.pass);
        checks.push(check);
    }
    let coverage = cell_passes as f64 / grid.len() as f64;
    checks.push(Check {
        group: "summary",
        name: "mc_coverage".into(),
        value: coverage,
        expected: 1.0,
        tolerance: 1.0 - MC_COVERAGE,
        pass: coverage >= MC_COVERAGE,
    });
    let passed = checks.iter().filter(|c| c.group != "mc").all(|c| c.pass);
    Ok(ValidationReport {
        checks,
        trials,
        seed,
        workers,
        passed,
    })
}

pub fn validate_table(report: &ValidationReport) -> Table {
    let cols = ["group", "check", "value", "expected", "tolerance", "pass"];
    let mut t = Table::new(cols.iter().map(|c| c.to_string()).collect());
    t.push_meta("command", "validate");
    t.push_meta("trials", report.trials);
    t.push_meta("workers", report.workers);
    t.push_meta("passed", report.passed);
    for c in &report.checks {
        t.push_row(vec![
            c.group.into(),
            c.name.as_str().into(),
            c.value.into(),
            c.expected.into(),
            c.tolerance.into(),
            c.pass.into(),
        ]);
    }
    t
}
