//! Outage analysis for selection decode-and-forward (SDF) relaying over
//! Rayleigh block fading at low SNR.
//!
//! - [`fading`]: channel statistics, reproducible random streams, exponential laws.
//! - [`analytic`]: exact outage and its low-SNR expansions, plus the
//!   reference curves for competing protocols.
//! - [`protocol`]: per-block mutual information and Monte Carlo outage estimation.
//! - [`energy`]: power split between the two slots and its optimisation.

pub mod analytic;
pub mod energy;
pub mod error;
pub mod fading;
pub mod protocol;

pub use analytic::{
    as_outage_series, baf_outage_series, cutset_bound_series, sdf_outage_exact,
    sdf_outage_exact_eps, sdf_outage_leading, sdf_outage_series, sum_exp_cdf, verify_series_order,
    LinkBudget, SeriesOrderReport,
};
pub use energy::{
    optimal_split_closed, optimal_split_numeric, split_outage_exact, split_outage_exact_eps,
    split_outage_leading, OptimizationResult, PowerSplit, BOUND_OPTIMUM,
};
pub use error::{Error, Result};
pub use fading::{
    derive_seed, exponential_cdf, sample_realization, ChannelRealization, ChannelStats, RngStream,
};
pub use protocol::{
    estimate_outage, mutual_info_combined, mutual_info_direct, mutual_info_sdf,
    mutual_info_sdf_split, OutageEstimate,
};
