use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{OptimizerConfig, RewardConfig};
use crate::error::{Error, Result};
use crate::instance::InstanceSource;
use crate::machine::Architecture;

/// Version of the JSON configuration schema accepted by this crate.
pub const CONFIG_SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    CONFIG_SCHEMA_VERSION
}

/// Which machine a config describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MachineKind {
    #[default]
    Npim,
    Cac,
    Aim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainerKind {
    /// Zeroth-order search over a Gaussian distribution of parameters.
    #[default]
    Das,
    /// Policy gradient on the stochastic discrete machine.
    Reinforce,
}

/// Per-epoch sample budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    pub epochs: usize,
    /// Instances per epoch.
    #[serde(rename = "B")]
    pub b: usize,
    /// Trajectories per instance.
    #[serde(rename = "R")]
    pub r: usize,
    /// Steps per trajectory.
    pub t_total: usize,
}

impl Budget {
    pub fn validate(&self) -> Result<()> {
        if self.b == 0 || self.r == 0 || self.t_total == 0 {
            return Err(Error::InvalidParameter("B, R and t_total must be >= 1".into()));
        }
        Ok(())
    }
}

/// Everything one training stage needs besides its instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainSettings {
    pub arch: Architecture,
    pub reward: RewardConfig,
    pub budget: Budget,
    pub optimizer: OptimizerConfig,
    pub normalize_fields: bool,
    pub seed: u64,
}

impl TrainSettings {
    pub fn validate(&self) -> Result<()> {
        self.arch.validate()?;
        self.reward.validate()?;
        self.budget.validate()?;
        self.optimizer.validate()
    }
}

/// One step of a bootstrapping pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    #[serde(default)]
    pub name: Option<String>,
    pub instances: InstanceSource,
    /// Overrides `budget.epochs`.
    #[serde(default)]
    pub epochs: Option<usize>,
    /// Overrides `budget.t_total`.
    #[serde(default)]
    pub t_total: Option<usize>,
    /// Start from the previous stage's weights.
    #[serde(default = "yes")]
    pub inherit: bool,
    /// Preload exhaustive ground energies into the ledger (n ≤ 24).
    #[serde(default)]
    pub exact_targets: bool,
}

fn yes() -> bool {
    true
}

/// Training configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub machine: MachineKind,
    #[serde(default)]
    pub trainer: TrainerKind,
    pub arch: Architecture,
    #[serde(default)]
    pub reward: RewardConfig,
    pub budget: Budget,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    pub stages: Vec<Stage>,
    #[serde(default)]
    pub seed: u64,
    /// Model file whose mean weights seed the first stage.
    #[serde(default)]
    pub fine_tune_from: Option<PathBuf>,
    #[serde(default)]
    pub normalize_fields: bool,
}

impl TrainConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: TrainConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::FormatVersion { found: self.schema_version, expected: CONFIG_SCHEMA_VERSION });
        }
        if self.machine != MachineKind::Npim {
            return Err(Error::InvalidParameter("only the npim machine is trainable".into()));
        }
        if self.stages.is_empty() {
            return Err(Error::InvalidParameter("at least one stage is required".into()));
        }
        for (i, stage) in self.stages.iter().enumerate() {
            if stage.instances.is_empty() {
                return Err(Error::InvalidParameter(format!("stage {i} has no instances")));
            }
            self.stage_settings(i).validate()?;
        }
        Ok(())
    }

    /// Settings of stage `index` with its overrides applied.
    pub fn stage_settings(&self, index: usize) -> TrainSettings {
        let stage = &self.stages[index];
        let budget = Budget {
            epochs: stage.epochs.unwrap_or(self.budget.epochs),
            t_total: stage.t_total.unwrap_or(self.budget.t_total),
            ..self.budget
        };
        TrainSettings {
            arch: self.arch,
            reward: self.reward,
            budget,
            optimizer: self.optimizer,
            normalize_fields: self.normalize_fields,
            seed: crate::rng::derive_seed(self.seed, &[crate::rng::TAG_STAGE, index as u64]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "arch": {"t_c": 8, "d": 1, "m": 1, "variant": "discrete"},
        "budget": {"epochs": 3, "B": 2, "R": 4, "t_total": 20},
        "stages": [{"instances": {"source": "sk", "n": 10, "count": 4}}],
        "seed": 1
    }"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = TrainConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.reward, RewardConfig::default());
        assert_eq!(cfg.optimizer, OptimizerConfig::default());
        assert!(cfg.stages[0].inherit);
        assert_eq!(cfg.stage_settings(0).budget.epochs, 3);
    }

    #[test]
    fn typos_and_versions_rejected() {
        let typo = MINIMAL.replace("\"seed\"", "\"sede\"");
        assert!(TrainConfig::from_json(&typo).is_err());
        let nested = MINIMAL.replace("\"B\"", "\"b\"");
        assert!(TrainConfig::from_json(&nested).is_err());
        let version = MINIMAL.replacen('{', "{\"schema_version\": 2,", 1);
        assert!(matches!(TrainConfig::from_json(&version), Err(Error::FormatVersion { .. })));
        let cac = MINIMAL.replacen('{', "{\"machine\": \"cac\",", 1);
        assert!(TrainConfig::from_json(&cac).is_err());
    }
}
