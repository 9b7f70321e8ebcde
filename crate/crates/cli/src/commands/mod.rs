pub mod bench;
pub mod generalize;
pub mod generate;
pub mod sweep;
pub mod trace;
pub mod train;

use std::path::{Path, PathBuf};

use npim::instance::IsingInstance;
use npim::training::{exact_ledger, EnergyLedger, EpochReport, StageOutcome};

use crate::error::{CliResult, RuntimeContext};
use crate::manifest::Outputs;

/// Flags shared by every command.
#[derive(Debug, Clone)]
pub struct Globals {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

impl Globals {
    pub fn config_path(&self) -> Option<&Path> {
        self.config.as_deref()
    }
}

pub(crate) fn log_epoch(label: &str, r: &EpochReport) {
    if r.epoch == 1 || r.epoch % 10 == 0 {
        eprintln!(
            "{label} epoch {:>4}  reward {:+.4}  tau {:.4}  |g_x| {:.3e}  {:.2}s",
            r.epoch, r.mean_reward, r.tau, r.grad_norm_x, r.seconds
        );
    }
}

pub(crate) fn epoch_csv(reports: &[EpochReport]) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    npim::training::write_epoch_csv(reports, &mut buf).runtime()?;
    Ok(buf)
}

/// Writes the model and per-epoch CSV of each stage under `prefix`.
pub(crate) fn write_stages(out: &mut Outputs, prefix: &str, stages: &[StageOutcome]) -> CliResult<()> {
    for s in stages {
        let meta = npim::machine::TrainingMeta {
            epochs: s.settings.budget.epochs,
            reward_kind: s.settings.reward.kind.name().into(),
            instance_family: s.family.clone(),
            seed: s.settings.seed,
        };
        let model = npim::machine::ModelFile::new(&s.model, meta).to_json().runtime()?;
        out.write(format!("{prefix}{}.model.json", s.name), model + "\n")?;
        out.write_timed(format!("{prefix}{}.epochs.csv", s.name), epoch_csv(&s.reports)?)?;
    }
    Ok(())
}

pub(crate) fn targets(instances: &[IsingInstance], exact: bool) -> CliResult<EnergyLedger> {
    if exact {
        exact_ledger(instances).runtime()
    } else {
        Ok(EnergyLedger::new())
    }
}

/// Mean reward over the last `k` epochs.
pub(crate) fn tail_mean(reports: &[EpochReport], k: usize) -> f64 {
    let tail = &reports[reports.len().saturating_sub(k)..];
    if tail.is_empty() {
        return f64::NAN;
    }
    tail.iter().map(|r| r.mean_reward).sum::<f64>() / tail.len() as f64
}
