//! Flat `key = value` run configuration.
//!
//! Keys are the long flag names without the leading dashes. `#` starts a
//! comment, blank lines are ignored, and command-line flags override values
//! read from the file.

use std::str::FromStr;

use sdf_core::{ChannelStats, PowerSplit};

use crate::compare::{Curve, EpsMode};
use crate::optimize::OptimizeMode;
use crate::{HarnessError, OutputFormat};

/// Environment variable consulted when neither flag nor file sets a seed.
pub const SEED_ENV: &str = "SDF_RELAY_SEED";
pub const DEFAULT_SEED: u64 = 20_070_101;
pub const DEFAULT_WORKERS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedSource {
    Flag,
    Config,
    Env,
    Default,
}

impl SeedSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SeedSource::Flag => "flag",
            SeedSource::Config => "config",
            SeedSource::Env => "env",
            SeedSource::Default => "default",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub alphas: Option<Vec<f64>>,
    pub sigma_sd: Option<f64>,
    pub sigma_rd: Option<f64>,
    pub sigma_sr: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<(u64, SeedSource)>,
    pub workers: Option<usize>,
    pub format: Option<OutputFormat>,
    pub out: Option<String>,
    pub eps_mode: Option<EpsMode>,
    pub rate: Option<f64>,
    pub rho: Option<f64>,
    pub curves: Option<Vec<Curve>>,
    pub split: Option<f64>,
    pub mode: Option<OptimizeMode>,
    pub tol: Option<f64>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("invalid value {value:?} for {key}"))
}

/// Comma-separated numbers, or `log:<lo>:<hi>:<n>` for `n` log-spaced points.
pub fn parse_alpha_list(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if let Some(spec) = s.strip_prefix("log:") {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected log:<lo>:<hi>:<n>, got {s:?}"));
        }
        let lo: f64 = parse_value("alphas", parts[0])?;
        let hi: f64 = parse_value("alphas", parts[1])?;
        let n: usize = parse_value("alphas", parts[2])?;
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(format!("log grid needs 0 < lo < hi and n >= 2, got {s:?}"));
        }
        return Ok(log_grid(lo, hi, n));
    }
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|v| parse_value("alphas", v)).collect()
}

pub fn parse_curve_list(s: &str) -> Result<Vec<Curve>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(Curve::from_str)
        .collect()
}

/// `n` points evenly spaced in `log10` from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64),
        })
        .collect()
}

/// Thirty points from `1e-3` to `0.3`.
pub fn default_alpha_grid() -> Vec<f64> {
    log_grid(1e-3, 0.3, 30)
}

impl Settings {
    /// Parses a config file; errors name the offending line and key.
    pub fn from_config_str(text: &str) -> Result<Self, HarnessError> {
        let mut settings = Settings::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!(
                    "line {lineno}: expected `key = value`, got {raw:?}"
                ))
            })?;
            settings
                .set(key.trim(), value.trim())
                .map_err(|msg| HarnessError::Config(format!("line {lineno}: {msg}")))?;
        }
        Ok(settings)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "alphas" => self.alphas = Some(parse_alpha_list(value)?),
            "sigma-sd" => self.sigma_sd = Some(parse_value(key, value)?),
            "sigma-rd" => self.sigma_rd = Some(parse_value(key, value)?),
            "sigma-sr" => self.sigma_sr = Some(parse_value(key, value)?),
            "trials" => self.trials = Some(parse_value(key, value)?),
            "seed" => self.seed = Some((parse_value(key, value)?, SeedSource::Config)),
            "workers" => self.workers = Some(parse_value(key, value)?),
            "format" => self.format = Some(parse_value(key, value)?),
            "out" => self.out = Some(value.to_string()),
            "eps-mode" => self.eps_mode = Some(parse_value(key, value)?),
            "rate" => self.rate = Some(parse_value(key, value)?),
            "rho" => self.rho = Some(parse_value(key, value)?),
            "curves" => self.curves = Some(parse_curve_list(value)?),
            "split" => self.split = Some(parse_value(key, value)?),
            "mode" => self.mode = Some(parse_value(key, value)?),
            "tol" => self.tol = Some(parse_value(key, value)?),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            alphas: over.alphas.or(self.alphas),
            sigma_sd: over.sigma_sd.or(self.sigma_sd),
            sigma_rd: over.sigma_rd.or(self.sigma_rd),
            sigma_sr: over.sigma_sr.or(self.sigma_sr),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            workers: over.workers.or(self.workers),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            eps_mode: over.eps_mode.or(self.eps_mode),
            rate: over.rate.or(self.rate),
            rho: over.rho.or(self.rho),
            curves: over.curves.or(self.curves),
            split: over.split.or(self.split),
            mode: over.mode.or(self.mode),
            tol: over.tol.or(self.tol),
        }
    }

    pub fn stats(&self) -> Result<ChannelStats, HarnessError> {
        ChannelStats::new(
            self.sigma_sd.unwrap_or(1.0),
            self.sigma_rd.unwrap_or(1.0),
            self.sigma_sr.unwrap_or(1.0),
        )
        .map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Flag or file seed, else `SDF_RELAY_SEED`, else [`DEFAULT_SEED`].
    pub fn resolve_seed(&self, env: Option<&str>) -> Result<(u64, SeedSource), HarnessError> {
        if let Some(seed) = self.seed {
            return Ok(seed);
        }
        match env {
            Some(v) => v
                .trim()
                .parse()
                .map(|s| (s, SeedSource::Env))
                .map_err(|_| HarnessError::Config(format!("invalid {SEED_ENV} value {v:?}"))),
            None => Ok((DEFAULT_SEED, SeedSource::Default)),
        }
    }

    pub fn workers(&self) -> Result<usize, HarnessError> {
        match self.workers.unwrap_or(DEFAULT_WORKERS) {
            0 => Err(HarnessError::Config("workers must be at least 1".into())),
            w => Ok(w),
        }
    }

    pub fn split(&self) -> Result<PowerSplit, HarnessError> {
        match self.split {
            Some(x) => PowerSplit::new(x).map_err(|e| HarnessError::Config(e.to_string())),
            None => Ok(sdf_core::optimal_split_closed()),
        }
    }

    /// The grid and the threshold mode, with an explicit `rho` collapsing
    /// the grid to the single point `2R/rho`.
    pub fn grid_and_mode(&self) -> Result<(Vec<f64>, EpsMode), HarnessError> {
        let mode = self.eps_mode.unwrap_or(EpsMode::Alpha);
        match mode {
            EpsMode::Alpha => {
                if self.rate.is_some() || self.rho.is_some() {
                    return Err(HarnessError::Config(
                        "--rate/--rho require --eps-mode explicit".into(),
                    ));
                }
                Ok((self.alphas.clone().unwrap_or_else(default_alpha_grid), mode))
            }
            EpsMode::Explicit => {
                let rate = self.rate.ok_or_else(|| {
                    HarnessError::Config("--eps-mode explicit requires --rate".into())
                })?;
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(HarnessError::Config(format!(
                        "rate must be positive, got {rate}"
                    )));
                }
                let grid = match self.rho {
                    Some(rho) if rho > 0.0 && rho.is_finite() => vec![2.0 * rate / rho],
                    Some(rho) => {
                        return Err(HarnessError::Config(format!(
                            "rho must be positive, got {rho}"
                        )))
                    }
                    None => self.alphas.clone().unwrap_or_else(default_alpha_grid),
                };
                Ok((grid, mode))
            }
        }
    }
}

pub fn check_alpha_grid(grid: &[f64]) -> Result<(), HarnessError> {
    if grid.is_empty() {
        return Err(HarnessError::Config("alpha grid is empty".into()));
    }
    if let Some(a) = grid.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(HarnessError::Config(format!(
            "alpha values must be positive, got {a}"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(HarnessError::Config(
            "alpha grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config_file() {
        let text = "\
# sweep
alphas = 0.05, 0.1,0.2
sigma-sd = 2   # direct link
curves = sdf_series,baf_series

seed = 9
format = json
";
        let s = Settings::from_config_str(text).unwrap();
        assert_eq!(s.alphas, Some(vec![0.05, 0.1, 0.2]));
        assert_eq!(s.sigma_sd, Some(2.0));
        assert_eq!(s.curves, Some(vec![Curve::SdfSeries, Curve::BafSeries]));
        assert_eq!(s.seed, Some((9, SeedSource::Config)));
        assert_eq!(s.format, Some(OutputFormat::Json));
    }

    #[test]
    fn config_errors_name_line_and_field() {
        let err = Settings::from_config_str("seed = 1\ntrials = many\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("trials"), "{msg}");

        let err = Settings::from_config_str("\nbogus = 1")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2") && err.contains("bogus"));

        let err = Settings::from_config_str("alphas").unwrap_err().to_string();
        assert!(err.contains("line 1"));

        let err = Settings::from_config_str("curves = sdf_exact, nope")
            .unwrap_err()
            .to_string();
        assert!(err.contains("nope"));
    }

    #[test]
    fn flags_override_file() {
        let file = Settings::from_config_str("seed = 1\ntrials = 5000\nsigma-rd = 3").unwrap();
        let flags = Settings {
            seed: Some((2, SeedSource::Flag)),
            ..Settings::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.seed, Some((2, SeedSource::Flag)));
        assert_eq!(merged.trials, Some(5000));
        assert_eq!(merged.sigma_rd, Some(3.0));
    }

    #[test]
    fn seed_resolution_order() {
        let s = Settings::default();
        assert_eq!(
            s.resolve_seed(None).unwrap(),
            (DEFAULT_SEED, SeedSource::Default)
        );
        assert_eq!(s.resolve_seed(Some("77")).unwrap(), (77, SeedSource::Env));
        assert!(s.resolve_seed(Some("x")).is_err());
        let s = Settings {
            seed: Some((5, SeedSource::Config)),
            ..Settings::default()
        };
        assert_eq!(s.resolve_seed(Some("77")).unwrap(), (5, SeedSource::Config));
    }

    #[test]
    fn alpha_lists() {
        assert_eq!(parse_alpha_list("").unwrap(), Vec::<f64>::new());
        let g = parse_alpha_list("log:1e-3:0.3:30").unwrap();
        assert_eq!(g, default_alpha_grid());
        assert_eq!(g.len(), 30);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[29], 0.3);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(parse_alpha_list("log:0.3:1e-3:30").is_err());
        assert!(parse_alpha_list("0.1,x").is_err());
    }

    #[test]
    fn grid_checks() {
        assert!(check_alpha_grid(&[]).is_err());
        assert!(check_alpha_grid(&[0.1, 0.05]).is_err());
        assert!(check_alpha_grid(&[0.0, 0.05]).is_err());
        assert!(check_alpha_grid(&[0.01, 0.05]).is_ok());
    }

    #[test]
    fn explicit_mode_needs_rate() {
        let s = Settings {
            eps_mode: Some(EpsMode::Explicit),
            ..Settings::default()
        };
        assert!(s.grid_and_mode().is_err());
        let s = Settings {
            eps_mode: Some(EpsMode::Explicit),
            rate: Some(0.01),
            rho: Some(0.2),
            ..Settings::default()
        };
        let (grid, _) = s.grid_and_mode().unwrap();
        assert_eq!(grid.len(), 1);
        assert!((grid[0] - 0.1).abs() < 1e-15);
        let s = Settings {
            rate: Some(0.01),
            ..Settings::default()
        };
        assert!(s.grid_and_mode().is_err());
    }
}
