use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{OutcomeDistribution, ProblemInstance};
use crate::strategies::StrategySpec;

/// Guard exponents swept by `clip-ratio` when none are given.
pub const DEFAULT_ALPHAS: [f64; 4] = [0.1, 0.2, 0.3333, 0.4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub control: OutcomeDistribution<f64>,
    pub treatment: OutcomeDistribution<f64>,
}

impl InstanceSpec {
    pub fn named(name: impl Into<String>, inst: &ProblemInstance<f64>) -> Self {
        Self {
            name: Some(name.into()),
            control: *inst.control(),
            treatment: *inst.treatment(),
        }
    }

    pub fn build(&self) -> Result<ProblemInstance<f64>> {
        ProblemInstance::new(self.control, self.treatment)
    }
}

/// Experiment description, read from a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceSpec>,
    pub strategies: Vec<StrategySpec>,
    pub horizons: Vec<u64>,
    pub replications: u64,
    pub seed: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Guard exponents for the clipping-time experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    /// Rounds simulated per clipping-time replication; defaults to the largest horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_horizon: Option<u64>,
}

fn default_delta() -> f64 {
    0.05
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: Self = serde_json::from_str(&text).map_err(|source| Error::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.horizons.is_empty() || self.horizons[0] < 1 {
            return Err(Error::Config("horizons must be nonempty and positive".into()));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("horizons must be strictly increasing".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta = {} outside (0, 1)", self.delta)));
        }
        if self.instances.is_empty() {
            return Err(Error::Config("no instances".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Config("no strategies".into()));
        }
        if self.clip_horizon == Some(0) {
            return Err(Error::Config("clip_horizon must be positive".into()));
        }
        if let Some(alphas) = &self.alphas {
            validate_alphas(alphas)?;
        }
        let mut names = HashSet::new();
        for (i, spec) in self.instances.iter().enumerate() {
            let inst = spec
                .build()
                .map_err(|e| Error::Config(format!("instance {}: {e}", self.instance_name(i))))?;
            inst.pi_star()
                .map_err(|e| Error::Config(format!("instance {}: {e}", self.instance_name(i))))?;
            if !names.insert(self.instance_name(i)) {
                return Err(Error::Config(format!(
                    "duplicate instance name {}",
                    self.instance_name(i)
                )));
            }
        }
        let mut ids = HashSet::new();
        for s in &self.strategies {
            s.validate()?;
            if !ids.insert(s.id()) {
                return Err(Error::Config(format!("duplicate strategy id {}; add a label", s.id())));
            }
        }
        Ok(())
    }

    pub fn instance_name(&self, i: usize) -> String {
        self.instances[i].name.clone().unwrap_or_else(|| format!("instance{i}"))
    }

    pub fn problem_instances(&self) -> Result<Vec<(String, ProblemInstance<f64>)>> {
        self.instances
            .iter()
            .enumerate()
            .map(|(i, s)| Ok((self.instance_name(i), s.build()?)))
            .collect()
    }

    pub fn clip_horizon(&self) -> u64 {
        self.clip_horizon
            .unwrap_or_else(|| *self.horizons.last().expect("validated nonempty"))
    }
}

pub(crate) fn validate_alphas(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::Config("no alphas given".into()));
    }
    for &a in alphas {
        if !(a > 0.0 && a < 0.5) {
            return Err(Error::Config(format!("alpha = {a} outside (0, 0.5)")));
        }
    }
    Ok(())
}
