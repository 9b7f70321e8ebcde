use clap::Args;
use npim::machine::{ModelFile, ParameterTensor, TrainingMeta};
use npim::training::{run_pipeline, TrainConfig};

use super::{log_epoch, write_stages, Globals};
use crate::config;
use crate::error::{CliError, CliResult, ConfigContext, RuntimeContext};
use crate::manifest::Outputs;

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Save the mean weights after these epochs (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub snapshot_epochs: Vec<usize>,
    /// Save the mean weights every this many epochs.
    #[arg(long)]
    pub snapshot_every: Option<usize>,
}

impl TrainArgs {
    fn wants(&self, epoch: usize) -> bool {
        self.snapshot_epochs.contains(&epoch) || self.snapshot_every.is_some_and(|k| k > 0 && epoch % k == 0)
    }
}

/// Loads, overrides and validates a training config.
pub fn load(g: &Globals) -> CliResult<config::Loaded<TrainConfig>> {
    let path = config::require(g.config_path(), "train")?;
    let mut loaded = config::load::<TrainConfig>(&path)?;
    if let Some(seed) = g.seed {
        loaded.value.seed = seed;
    }
    loaded.value.validate().config()?;
    Ok(loaded)
}

/// Initial weights from `fine_tune_from`, checked against the config's architecture.
pub fn init_weights(cfg: &TrainConfig, base: &std::path::Path) -> CliResult<Option<ParameterTensor>> {
    let Some(from) = &cfg.fine_tune_from else { return Ok(None) };
    let params = config::load_model(&config::resolve(base, from))?.params().config()?;
    if params.arch() != &cfg.arch {
        return Err(CliError::Config(format!(
            "incompatible architecture: fine_tune_from has {:?}, config has {:?}",
            params.arch(),
            cfg.arch
        )));
    }
    Ok(Some(params))
}

/// The success reward's partial-credit band assumes negative target energies.
fn warn_nonnegative_targets(s: &npim::training::StageOutcome) {
    if s.settings.reward.kind != npim::training::RewardKind::Success {
        return;
    }
    let count = s.ledger.iter().filter(|(_, e)| *e >= 0.0).count();
    if count > 0 {
        eprintln!("warning: {}: {count} instances have target energy >= 0; success rewards may be degenerate", s.name);
    }
}

/// Writes `<stage>.model.json` and `<stage>.epochs.csv` per stage, plus
/// `<stage>/snapshots/epoch-NNNNN.model.json` for requested epochs.
pub fn run(args: &TrainArgs, g: &Globals) -> CliResult<()> {
    let loaded = load(g)?;
    let cfg = &loaded.value;
    let init = init_weights(cfg, &loaded.base)?;
    let names: Vec<String> =
        cfg.stages.iter().enumerate().map(|(i, s)| s.name.clone().unwrap_or_else(|| format!("stage{i}"))).collect();
    let mut snapshots = Vec::new();
    let stages = run_pipeline(cfg, &loaded.base, init, &mut |stage, report, state| {
        log_epoch(&names[stage], report);
        if args.wants(report.epoch) {
            snapshots.push((stage, report.epoch, state.params(&cfg.arch)));
        }
    })
    .runtime()?;

    let mut out = Outputs::new(&g.out)?;
    write_stages(&mut out, "", &stages)?;
    for (stage, epoch, params) in snapshots {
        let s = &stages[stage];
        let meta = TrainingMeta {
            epochs: epoch,
            reward_kind: s.settings.reward.kind.name().into(),
            instance_family: s.family.clone(),
            seed: s.settings.seed,
        };
        let json = ModelFile::new(&params.runtime()?, meta).to_json().runtime()?;
        out.write(format!("{}/snapshots/epoch-{epoch:05}.model.json", s.name), json + "\n")?;
    }
    for s in &stages {
        warn_nonnegative_targets(s);
        eprintln!("{}: final reward {:+.4}", s.name, s.reports.last().map_or(f64::NAN, |r| r.mean_reward));
    }
    out.finish("train", Some(&loaded.path), cfg.seed)?;
    Ok(())
}
