//! Energy split between the direct slot and the relayed (or repeated) slot.
//!
//! A fraction `x` of the block energy goes to the first slot, so the first
//! slot sees SNR `2x rho` and the second `2(1-x) rho`. When the relay fails
//! to decode, the source repeats and both slots recombine on the direct link.

use serde::Serialize;

use crate::analytic::{sum_exp_cdf, LinkBudget};
use crate::error::{nonnegative, Error, Result};
use crate::fading::{exponential_cdf, exponential_sf, ChannelStats};

/// Optimum split reported for the max-flow min-cut bound in the symmetric
/// case (quoted numerically as 0.667).
pub const BOUND_OPTIMUM: f64 = 2.0 / 3.0;

pub const DEFAULT_BRACKET: (f64, f64) = (0.01, 0.99);
pub const MAX_ITERATIONS: u32 = 200;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Fraction of block energy spent in the direct slot, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct PowerSplit(f64);

impl PowerSplit {
    pub const EQUAL: PowerSplit = PowerSplit(0.5);

    pub fn new(x: f64) -> Result<Self> {
        if x > 0.0 && x < 1.0 {
            Ok(Self(x))
        } else {
            Err(Error::SplitOutOfRange(x))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Leading-order split outage `(alpha^2/8) (3 - 2x) / (x (1 - x))`.
pub fn split_outage_leading(alpha: f64, split: PowerSplit) -> f64 {
    let x = split.0;
    alpha * alpha / 8.0 * ((3.0 - 2.0 * x) / (x * (1.0 - x)))
}

/// Minimiser of [`split_outage_leading`]: `x = (3 - sqrt 3) / 2`.
pub fn optimal_split_closed() -> PowerSplit {
    PowerSplit((3.0 - 3f64.sqrt()) / 2.0)
}

/// Exact split outage at the budget's threshold.
pub fn split_outage_exact(budget: &LinkBudget, stats: &ChannelStats, split: PowerSplit) -> f64 {
    split_outage_at(budget.epsilon(), stats, split)
}

/// [`split_outage_exact`] parameterised directly by the threshold `epsilon`.
pub fn split_outage_exact_eps(
    epsilon: f64,
    stats: &ChannelStats,
    split: PowerSplit,
) -> Result<f64> {
    Ok(split_outage_at(
        nonnegative("epsilon", epsilon)?,
        stats,
        split,
    ))
}

fn split_outage_at(eps: f64, stats: &ChannelStats, split: PowerSplit) -> f64 {
    let x = split.0;
    // relay decodes iff 2x h >= eps
    let relay_threshold = eps / (2.0 * x);
    let direct = exponential_cdf(eps / 2.0, stats.sigma_sd()).unwrap();
    let relay_fails = exponential_cdf(relay_threshold, stats.sigma_sr()).unwrap();
    let combined = sum_exp_cdf(
        eps,
        2.0 * x * stats.sigma_sd(),
        2.0 * (1.0 - x) * stats.sigma_rd(),
    )
    .unwrap();
    let relay_decodes = exponential_sf(relay_threshold, stats.sigma_sr());
    direct * relay_fails + combined * relay_decodes
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub x_star: PowerSplit,
    pub objective_at_star: f64,
    pub iterations: u32,
    pub converged: bool,
}

/// Golden-section search for the minimum of `objective` on `bracket`.
///
/// A bracket touching 0 or 1 is pulled in to [`DEFAULT_BRACKET`] at that
/// side, since split objectives diverge there. The search stops once the
/// bracket is narrower than `tol`, or reports `converged = false` after
/// [`MAX_ITERATIONS`]. A minimum found at an endpoint also clears `converged`.
pub fn optimal_split_numeric<F>(
    mut objective: F,
    bracket: (f64, f64),
    tol: f64,
) -> Result<OptimizationResult>
where
    F: FnMut(PowerSplit) -> f64,
{
    let lo = if bracket.0 <= 0.0 {
        DEFAULT_BRACKET.0
    } else {
        bracket.0
    };
    let hi = if bracket.1 >= 1.0 {
        DEFAULT_BRACKET.1
    } else {
        bracket.1
    };
    let lo_split = PowerSplit::new(lo)?;
    let hi_split = PowerSplit::new(hi)?;
    if lo >= hi {
        return Err(Error::Domain(format!("empty bracket ({lo}, {hi})")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::NotPositive {
            name: "tol",
            value: tol,
        });
    }

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = objective(PowerSplit(c));
    let mut fd = objective(PowerSplit(d));
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        if b - a <= tol {
            converged = true;
            break;
        }
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(PowerSplit(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(PowerSplit(d));
        }
    }

    let mut x_star = PowerSplit(0.5 * (a + b));
    let mut f_star = objective(x_star);
    for (edge, f_edge) in [
        (lo_split, objective(lo_split)),
        (hi_split, objective(hi_split)),
    ] {
        if f_edge < f_star {
            x_star = edge;
            f_star = f_edge;
            converged = false;
        }
    }

    Ok(OptimizationResult {
        x_star,
        objective_at_star: f_star,
        iterations,
        converged,
    })
}
