//! Rayleigh block fading.
//!
//! Each link amplitude `a_ij` is circularly symmetric complex Gaussian, so its
//! squared magnitude is exponential. Only the squared gains enter any outage
//! event, which is why the amplitudes themselves are never sampled.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{nonnegative, positive, Result};

/// Mean squared gain of each link (`E[|a_ij|^2]`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelStats {
    sigma_sd: f64,
    sigma_rd: f64,
    sigma_sr: f64,
}

impl ChannelStats {
    pub fn new(sigma_sd: f64, sigma_rd: f64, sigma_sr: f64) -> Result<Self> {
        Ok(Self {
            sigma_sd: positive("sigma_sd", sigma_sd)?,
            sigma_rd: positive("sigma_rd", sigma_rd)?,
            sigma_sr: positive("sigma_sr", sigma_sr)?,
        })
    }

    /// All three links with unit mean gain.
    pub const fn unit() -> Self {
        Self {
            sigma_sd: 1.0,
            sigma_rd: 1.0,
            sigma_sr: 1.0,
        }
    }

    pub fn sigma_sd(&self) -> f64 {
        self.sigma_sd
    }

    pub fn sigma_rd(&self) -> f64 {
        self.sigma_rd
    }

    pub fn sigma_sr(&self) -> f64 {
        self.sigma_sr
    }
}

impl Default for ChannelStats {
    fn default() -> Self {
        Self::unit()
    }
}

/// One block's squared channel magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelRealization {
    /// Source to destination, `|a_sd|^2`.
    pub g1: f64,
    /// Relay to destination, `|a_rd|^2`.
    pub g2: f64,
    /// Source to relay, `|a_sr|^2`.
    pub h: f64,
}

/// A reproducible random stream keyed by `(seed, stream_id)`.
///
/// Backed by ChaCha8 with the seed expanded through `seed_from_u64` and the
/// stream id selecting one of the 2^64 independent ChaCha streams. Uniforms
/// are the top 53 bits of each 64-bit output scaled into `[0, 1)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Exponential with the given mean, by inverse transform.
    #[inline]
    pub fn next_exponential(&mut self, mean: f64) -> f64 {
        -mean * (-self.next_uniform()).ln_1p()
    }
}

/// Derives an independent seed for the `index`-th cell of a sweep.
///
/// SplitMix64 finaliser over `seed + index * golden gamma`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Draws `(g1, g2, h)` in that order, one uniform each.
#[inline]
pub fn sample_realization(stats: &ChannelStats, rng: &mut RngStream) -> ChannelRealization {
    let g1 = rng.next_exponential(stats.sigma_sd);
    let g2 = rng.next_exponential(stats.sigma_rd);
    let h = rng.next_exponential(stats.sigma_sr);
    ChannelRealization { g1, g2, h }
}

/// `P{X <= x}` for `X` exponential with the given mean.
pub fn exponential_cdf(x: f64, mean: f64) -> Result<f64> {
    let x = nonnegative("x", x)?;
    let mean = positive("mean", mean)?;
    Ok(-(-x / mean).exp_m1())
}

/// `P{X > x}`, computed directly rather than as `1 - cdf`.
pub(crate) fn exponential_sf(x: f64, mean: f64) -> f64 {
    (-x / mean).exp()
}
