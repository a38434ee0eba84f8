//! JSON experiment configuration.
//!
//! Every key is optional; an empty object `{}` describes the reference
//! experiment (unit-rate exponential valuations, α1 = 0.8, α0 = 0.2,
//! ρ_th = 0.5, μ = 0.5, no harvesting, 1000 slots, N0 = 1..100,
//! 100 replications). Unknown keys are rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::dp::{DpConfig, Recursion};
use crate::error::{Error, Result};
use crate::policy::PolicySpec;
use crate::sim::SimConfig;
use crate::valuation::{Distribution, ValuationModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub valuation: Distribution,
    pub alpha0: f64,
    pub alpha1: f64,
    pub mu: f64,
    pub rho_th: f64,
    pub pi: f64,
    /// Slot length in seconds. Carried for documentation only.
    pub tau: f64,
    pub horizon: usize,
    pub shutdown_on_empty: bool,
    pub recursion: Recursion,
    pub initial_battery_levels: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub threads: usize,
    pub policies: Option<Vec<PolicySpec>>,
    pub verify: VerifyOptions,
}

impl Default for ConfigFile {
    fn default() -> Self {
        let ch = ChannelModel::default();
        Self {
            valuation: Distribution::Exponential { rate: 1.0 },
            alpha0: ch.alpha0(),
            alpha1: ch.alpha1(),
            mu: ch.mu(),
            rho_th: ch.rho_th(),
            pi: 0.0,
            tau: 0.01,
            horizon: 1000,
            shutdown_on_empty: true,
            recursion: Recursion::default(),
            initial_battery_levels: (1..=100).collect(),
            replications: 100,
            seed: 0,
            threads: 0,
            policies: None,
            verify: VerifyOptions::default(),
        }
    }
}

/// Grid for the `verify` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyOptions {
    pub initial_battery: Vec<usize>,
    pub horizons: Vec<usize>,
    pub tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            initial_battery: vec![1, 2, 3],
            horizons: (2..=6).collect(),
            tolerance: 1e-9,
        }
    }
}

/// Validated configuration with defaults applied.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub file: ConfigFile,
    pub sim: SimConfig,
}

impl ExperimentConfig {
    pub fn dp(&self) -> &DpConfig {
        &self.sim.dp
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.file.seed = seed;
        self.sim.seed = seed;
    }

    pub fn set_threads(&mut self, threads: usize) {
        self.file.threads = threads;
        self.sim.threads = threads;
    }
}

impl TryFrom<ConfigFile> for ExperimentConfig {
    type Error = Error;

    fn try_from(file: ConfigFile) -> Result<Self> {
        let valuation = ValuationModel::new(file.valuation.clone())?;
        let channel = ChannelModel::new(file.alpha0, file.alpha1, file.mu, file.rho_th)?;
        if !(file.tau.is_finite() && file.tau > 0.0) {
            return Err(Error::invalid("tau", "must be > 0"));
        }
        if file.horizon == 0 {
            return Err(Error::invalid("horizon", "must be ≥ 1"));
        }
        if !(file.verify.tolerance.is_finite() && file.verify.tolerance >= 0.0) {
            return Err(Error::invalid("verify.tolerance", "must be ≥ 0"));
        }
        let dp = DpConfig::new(valuation, channel, file.pi, file.horizon)?
            .with_shutdown_on_empty(file.shutdown_on_empty)
            .with_recursion(file.recursion);
        let policies = match &file.policies {
            Some(p) => p.clone(),
            None => PolicySpec::defaults(&dp.valuation),
        };
        let sim = SimConfig {
            dp,
            initial_battery_levels: file.initial_battery_levels.clone(),
            replications: file.replications,
            seed: file.seed,
            policies,
            threads: file.threads,
        };
        sim.validate()?;
        Ok(Self { file, sim })
    }
}

pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|source| Error::Parse {
        path: origin.to_path_buf(),
        source,
    })?;
    ExperimentConfig::try_from(file)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}
