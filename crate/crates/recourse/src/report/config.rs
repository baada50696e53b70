//! Line-oriented `key=value` run configuration.
//!
//! UTF-8, `#` starts a comment, blank lines are ignored, unknown keys are
//! errors. Every default can be overridden.

use std::path::Path;

use thiserror::Error;

use crate::logit::TrainConfig;
use crate::policy::{InvalidParameter, PolicyParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: could not parse value {value:?} for {key}")]
    BadValue {
        line: usize,
        key: &'static str,
        value: String,
    },
    #[error("invalid parameter: {0}")]
    Param(#[from] InvalidParameter),
    #[error("failed to read config file")]
    Io(#[from] std::io::Error),
}

/// Full run configuration with the documented defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub train_fraction: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub l2_penalty: f64,
    /// Illustration parameters for the policy bands.
    pub u: f64,
    pub m: f64,
    /// Bins of the probability histograms.
    pub histogram_bins: usize,
    /// Bins of the calibration report.
    pub calibration_bins: usize,
    /// Sharpening exponents of the confidence series.
    pub betas: Vec<f64>,
    /// Grid steps per axis for parameter sweeps.
    pub sweep_steps: usize,
    /// Draws per Monte Carlo estimate.
    pub draws: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 17,
            train_fraction: 0.75,
            max_iterations: 100,
            tolerance: 1e-8,
            l2_penalty: 1e-4,
            u: 0.5,
            m: 0.2,
            histogram_bins: 20,
            calibration_bins: 10,
            betas: vec![1.0, 2.0, 4.0],
            sweep_steps: 101,
            draws: 1_000_000,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut config = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Malformed {
                line,
                text: raw.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            macro_rules! set {
                ($field:ident, $name:literal) => {
                    config.$field = value.parse().map_err(|_| ConfigError::BadValue {
                        line,
                        key: $name,
                        value: value.to_string(),
                    })?
                };
            }
            match key {
                "seed" => set!(seed, "seed"),
                "train_fraction" => set!(train_fraction, "train_fraction"),
                "max_iterations" => set!(max_iterations, "max_iterations"),
                "tolerance" => set!(tolerance, "tolerance"),
                "l2_penalty" => set!(l2_penalty, "l2_penalty"),
                "u" => set!(u, "u"),
                "m" => set!(m, "m"),
                "histogram_bins" => set!(histogram_bins, "histogram_bins"),
                "calibration_bins" => set!(calibration_bins, "calibration_bins"),
                "sweep_steps" => set!(sweep_steps, "sweep_steps"),
                "draws" => set!(draws, "draws"),
                "betas" => {
                    let parsed: Result<Vec<f64>, _> =
                        value.split(',').map(|v| v.trim().parse()).collect();
                    config.betas = parsed.map_err(|_| ConfigError::BadValue {
                        line,
                        key: "betas",
                        value: value.to_string(),
                    })?;
                }
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })
                }
            }
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        RunConfig::parse(&std::fs::read_to_string(path)?)
    }

    pub fn policy(&self) -> Result<PolicyParams, InvalidParameter> {
        PolicyParams::new(self.u, self.m)
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            l2_penalty: self.l2_penalty,
            seed: self.seed,
            train_fraction: self.train_fraction,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_survive_empty_config() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
        assert_eq!(
            RunConfig::parse("# only a comment\n\n").unwrap(),
            RunConfig::default()
        );
    }

    #[test]
    fn overrides_and_comments() {
        let config = RunConfig::parse("seed = 99 # reproducibility\nu=0.7\nbetas = 1, 3, 9\n")
            .unwrap();
        assert_eq!(config.seed, 99);
        assert_eq!(config.u, 0.7);
        assert_eq!(config.betas, vec![1.0, 3.0, 9.0]);
        assert_eq!(config.m, RunConfig::default().m);
    }

    #[test]
    fn unknown_keys_are_errors() {
        match RunConfig::parse("seeed=1\n") {
            Err(ConfigError::UnknownKey { line: 1, key }) => assert_eq!(key, "seeed"),
            other => panic!("expected unknown-key error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_and_bad_values_are_errors() {
        assert!(matches!(
            RunConfig::parse("just words\n"),
            Err(ConfigError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            RunConfig::parse("seed=abc\n"),
            Err(ConfigError::BadValue { key: "seed", .. })
        ));
    }
}
