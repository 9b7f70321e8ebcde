use std::path::{Path, PathBuf};

use npim::baselines::{AimConfig, CacConfig};
use npim::benchmark::{Readout, Steps};
use npim::instance::InstanceSource;
use npim::machine::{Architecture, IsingMachine, ModelFile, Npim, TrajectoryOptions};
use npim::training::{Budget, OptimizerConfig, RewardConfig, TrainConfig, TrainerKind, CONFIG_SCHEMA_VERSION};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult, ConfigContext};

fn schema_version() -> u32 {
    CONFIG_SCHEMA_VERSION
}

fn check_version(found: u32) -> CliResult<()> {
    if found != CONFIG_SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "unsupported schema_version {found} (expected {CONFIG_SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

/// A parsed config file and the directory its relative paths resolve against.
pub struct Loaded<T> {
    pub value: T,
    pub path: PathBuf,
    pub base: PathBuf,
}

pub fn require(path: Option<&Path>, command: &str) -> CliResult<PathBuf> {
    path.map(Path::to_path_buf).ok_or_else(|| CliError::Config(format!("{command} needs --config <path>")))
}

pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<Loaded<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { value, path: path.to_path_buf(), base })
}

pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn load_model(path: &Path) -> CliResult<ModelFile> {
    ModelFile::load(path).map_err(|e| CliError::Config(format!("model {}: {e}", path.display())))
}

/// Machine under benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MachineSpec {
    Npim {
        model: PathBuf,
        #[serde(default)]
        normalize_fields: bool,
    },
    /// Bundled tuned defaults unless `params` is given.
    Cac {
        #[serde(default)]
        params: Option<CacConfig>,
    },
    Aim {
        #[serde(default)]
        params: Option<AimConfig>,
    },
}

impl MachineSpec {
    pub fn build(&self, base: &Path) -> CliResult<Box<dyn IsingMachine>> {
        Ok(match self {
            MachineSpec::Npim { model, normalize_fields } => {
                let params = load_model(&resolve(base, model))?.params().config()?;
                let options = TrajectoryOptions { trace: false, normalize_fields: *normalize_fields };
                Box::new(Npim { params, options })
            }
            MachineSpec::Cac { params } => {
                let c = params.unwrap_or_default();
                c.validate().config()?;
                Box::new(c)
            }
            MachineSpec::Aim { params } => {
                let c = params.unwrap_or_default();
                c.validate().config()?;
                Box::new(c)
            }
        })
    }
}

/// Where success targets come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSpec {
    /// Best objective over the suite's own runs.
    #[default]
    BestFound,
    /// Exhaustive optimum; small instances only.
    Exact,
    /// Best-known G-set cuts bundled with the library, looked up by instance id.
    Published,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub machine: MachineSpec,
    pub instances: Vec<InstanceSource>,
    pub steps: Steps,
    pub runs: usize,
    #[serde(default)]
    pub best_of: Option<usize>,
    #[serde(default)]
    pub readout: Option<Readout>,
    #[serde(default)]
    pub targets: TargetSpec,
    #[serde(default)]
    pub seed: u64,
}

impl BenchConfig {
    pub fn validate(&self) -> CliResult<()> {
        check_version(self.schema_version)?;
        if self.instances.iter().all(InstanceSource::is_empty) {
            return Err(CliError::Config("benchmark has no instances".into()));
        }
        if self.runs == 0 || self.best_of == Some(0) {
            return Err(CliError::Config("runs and best_of must be >= 1".into()));
        }
        Ok(())
    }
}

/// Train/test split experiment over training-set size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralizeConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub trainer: TrainerKind,
    pub arch: Architecture,
    #[serde(default)]
    pub reward: RewardConfig,
    pub budget: Budget,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub normalize_fields: bool,
    /// Training pool; size `k` trains on its first `k` instances.
    pub train_instances: InstanceSource,
    /// Held-out split.
    pub test_instances: InstanceSource,
    #[serde(default = "default_train_sizes")]
    pub train_sizes: Vec<usize>,
    /// Evaluation runs per instance.
    pub eval_runs: usize,
    /// Score against exhaustive ground energies instead of the best energy
    /// seen in any evaluation run.
    #[serde(default)]
    pub exact_targets: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_train_sizes() -> Vec<usize> {
    vec![1, 3, 10, 30, 100]
}

impl GeneralizeConfig {
    pub fn validate(&self) -> CliResult<()> {
        check_version(self.schema_version)?;
        if self.test_instances.is_empty() {
            return Err(CliError::Config("test split is empty".into()));
        }
        let pool = self.train_instances.len();
        match self.train_sizes.iter().find(|&&k| k == 0 || k > pool) {
            Some(k) => Err(CliError::Config(format!("train size {k} outside 1..={pool}"))),
            None if self.train_sizes.is_empty() => Err(CliError::Config("no train sizes".into())),
            None if self.eval_runs == 0 => Err(CliError::Config("eval_runs must be >= 1".into())),
            None => Ok(()),
        }
    }
}

/// One architecture of a sweep; variant and basis come from the base config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub t_c: usize,
    pub d: usize,
    pub m: usize,
}

/// Held-out success-rate evaluation after each sweep run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEval {
    pub instances: InstanceSource,
    pub runs: usize,
    /// Defaults to the last stage's `t_total`.
    #[serde(default)]
    pub t_total: Option<usize>,
    #[serde(default)]
    pub exact_targets: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub base: TrainConfig,
    pub points: Vec<SweepPoint>,
    #[serde(default)]
    pub eval: Option<SweepEval>,
}

impl SweepConfig {
    pub fn validate(&self) -> CliResult<()> {
        check_version(self.schema_version)?;
        if self.points.is_empty() {
            return Err(CliError::Config("sweep has no points".into()));
        }
        for p in &self.points {
            self.config_for(p).validate().config()?;
        }
        if let Some(e) = &self.eval {
            if e.runs == 0 || e.instances.is_empty() {
                return Err(CliError::Config("sweep eval needs runs >= 1 and instances".into()));
            }
        }
        Ok(())
    }

    pub fn config_for(&self, p: &SweepPoint) -> TrainConfig {
        let mut cfg = self.base.clone();
        cfg.arch = Architecture { t_c: p.t_c, d: p.d, m: p.m, ..self.base.arch };
        cfg
    }
}
