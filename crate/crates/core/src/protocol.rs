//! Per-block mutual information and Monte Carlo outage estimation.
//!
//! Rates are in nats with the half-duplex 1/2 pre-log; a block is in outage
//! when its mutual information is strictly below the target rate.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::LinkBudget;
use crate::energy::PowerSplit;
use crate::error::{Error, Result};
use crate::fading::{sample_realization, ChannelRealization, ChannelStats, RngStream};

pub const MIN_TRIALS: u64 = 1_000;

const Z95: f64 = 1.959_963_984_540_054;

/// SDF mutual information with equal energy in both slots.
///
/// The relay forwards when `(1/2) ln(1 + rho h) >= R`; otherwise the source
/// repeats and the destination sees `2 rho g1`.
#[inline]
pub fn mutual_info_sdf(real: &ChannelRealization, budget: &LinkBudget) -> f64 {
    let rho = budget.snr();
    if 0.5 * (rho * real.h).ln_1p() >= budget.rate() {
        0.5 * (rho * (real.g1 + real.g2)).ln_1p()
    } else {
        0.5 * (2.0 * rho * real.g1).ln_1p()
    }
}

/// SDF mutual information with fraction `x` of the energy in the first slot.
///
/// At `x = 1/2` this is bit-identical to [`mutual_info_sdf`].
#[inline]
pub fn mutual_info_sdf_split(
    real: &ChannelRealization,
    budget: &LinkBudget,
    split: PowerSplit,
) -> f64 {
    let rho = budget.snr();
    let x = split.value();
    if 0.5 * (2.0 * x * rho * real.h).ln_1p() >= budget.rate() {
        0.5 * (2.0 * rho * (x * real.g1 + (1.0 - x) * real.g2)).ln_1p()
    } else {
        // both slots land on the direct link
        0.5 * (2.0 * rho * real.g1).ln_1p()
    }
}

/// Source repeats in both slots regardless of the relay.
#[inline]
pub fn mutual_info_direct(real: &ChannelRealization, budget: &LinkBudget) -> f64 {
    0.5 * (2.0 * budget.snr() * real.g1).ln_1p()
}

/// Relay always forwards; outage is the event `g1 + g2 < epsilon`.
#[inline]
pub fn mutual_info_combined(real: &ChannelRealization, budget: &LinkBudget) -> f64 {
    0.5 * (budget.snr() * (real.g1 + real.g2)).ln_1p()
}

/// Monte Carlo outage estimate with a normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub outages: u64,
    pub trials: u64,
    pub stderr: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub seed: u64,
    pub workers: usize,
}

impl OutageEstimate {
    fn from_counts(outages: u64, trials: u64, seed: u64, workers: usize) -> Self {
        let p = outages as f64 / trials as f64;
        let stderr = (p * (1.0 - p) / trials as f64).sqrt();
        Self {
            p_hat: p,
            outages,
            trials,
            stderr,
            ci95_low: (p - Z95 * stderr).max(0.0),
            ci95_high: (p + Z95 * stderr).min(1.0),
            seed,
            workers,
        }
    }

    /// `|value - p_hat| <= k * stderr`.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (value - self.p_hat).abs() <= k * self.stderr
    }
}

/// Fraction of sampled blocks with `protocol(real, budget) < R`.
///
/// Trials are split evenly over `workers` partitions, the last taking the
/// remainder; partition `w` draws from `RngStream::new(seed, w)`. The result
/// depends only on `(seed, workers, trials)`, not on the thread pool.
pub fn estimate_outage<P>(
    protocol: P,
    stats: &ChannelStats,
    budget: &LinkBudget,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<OutageEstimate>
where
    P: Fn(&ChannelRealization, &LinkBudget) -> f64 + Sync,
{
    if trials < MIN_TRIALS {
        return Err(Error::Domain(format!(
            "at least {MIN_TRIALS} trials required, got {trials}"
        )));
    }
    if workers == 0 {
        return Err(Error::Domain("workers must be at least 1".into()));
    }
    let per_worker = trials / workers as u64;
    let rate = budget.rate();

    let outages: u64 = (0..workers)
        .into_par_iter()
        .map(|w| {
            let n = if w + 1 == workers {
                trials - per_worker * (workers as u64 - 1)
            } else {
                per_worker
            };
            let mut rng = RngStream::new(seed, w as u64);
            let mut count = 0u64;
            for _ in 0..n {
                let real = sample_realization(stats, &mut rng);
                if protocol(&real, budget) < rate {
                    count += 1;
                }
            }
            count
        })
        .sum();

    Ok(OutageEstimate::from_counts(outages, trials, seed, workers))
}
