use std::path::Path;

use super::{
    reinforce_epoch, EnergyLedger, EpochReport, TrainConfig, TrainSettings, TrainerKind, TrainerState,
};
use crate::error::{Error, Result};
use crate::instance::{brute_force_ground, IsingInstance};
use crate::machine::ParameterTensor;

/// Output of one pipeline stage.
#[derive(Debug, Clone)]
pub struct StageOutcome {
    pub name: String,
    pub family: String,
    pub settings: TrainSettings,
    pub model: ParameterTensor,
    pub reports: Vec<EpochReport>,
    pub ledger: EnergyLedger,
}

/// Exhaustive ground energies for every instance.
pub fn exact_ledger(instances: &[IsingInstance]) -> Result<EnergyLedger> {
    let mut ledger = EnergyLedger::new();
    for inst in instances {
        ledger.update(inst.id(), brute_force_ground(inst)?.energy);
    }
    Ok(ledger)
}

/// Runs the stages of `cfg` in order.
///
/// Each stage trains on its own instances and ledger. A stage with
/// `inherit` starts from the previous stage's mean weights (the first stage
/// from `init`, if given) and resets the exploration matrix.
pub fn run_pipeline(
    cfg: &TrainConfig,
    base_dir: &Path,
    init: Option<ParameterTensor>,
    on_epoch: &mut dyn FnMut(usize, &EpochReport, &TrainerState),
) -> Result<Vec<StageOutcome>> {
    cfg.validate()?;
    let mut previous = init;
    let mut outcomes = Vec::with_capacity(cfg.stages.len());
    for (index, stage) in cfg.stages.iter().enumerate() {
        let settings = cfg.stage_settings(index);
        let source = stage.instances.resolved(base_dir);
        let instances: Vec<IsingInstance> = source.load(settings.seed)?.into_iter().map(|l| l.ising).collect();
        let mut ledger = if stage.exact_targets { exact_ledger(&instances)? } else { EnergyLedger::new() };
        let start = if stage.inherit { previous.take() } else { None };
        let (model, reports) =
            run_stage(cfg.trainer, &settings, &instances, &mut ledger, start.as_ref(), &mut |r, s| {
                on_epoch(index, r, s)
            })?;
        previous = Some(model.clone());
        outcomes.push(StageOutcome {
            name: stage.name.clone().unwrap_or_else(|| format!("stage{index}")),
            family: source.family(),
            settings,
            model,
            reports,
            ledger,
        });
    }
    Ok(outcomes)
}

/// Trains one stage with the chosen trainer and returns the mean weights.
pub fn run_stage(
    trainer: TrainerKind,
    settings: &TrainSettings,
    instances: &[IsingInstance],
    ledger: &mut EnergyLedger,
    init: Option<&ParameterTensor>,
    on_epoch: &mut dyn FnMut(&EpochReport, &TrainerState),
) -> Result<(ParameterTensor, Vec<EpochReport>)> {
    match trainer {
        TrainerKind::Das => {
            let out = super::train(settings, instances, ledger, init, on_epoch)?;
            Ok((out.model(settings)?, out.reports))
        }
        TrainerKind::Reinforce => {
            settings.validate()?;
            let mut state = match init {
                Some(p) if p.arch() != &settings.arch => {
                    return Err(Error::IncompatibleArchitecture(format!("{:?} vs {:?}", p.arch(), settings.arch)))
                }
                Some(p) => TrainerState::from_mean(p.to_flat(), &settings.optimizer, settings.reward.tau0),
                None => TrainerState::init(&settings.arch, &settings.optimizer, settings.reward.tau0, settings.seed),
            };
            let mut reports = Vec::with_capacity(settings.budget.epochs);
            for _ in 0..settings.budget.epochs {
                let r = reinforce_epoch(&mut state, instances, settings, ledger)?;
                on_epoch(&r, &state);
                reports.push(r);
            }
            Ok((state.params(&settings.arch)?, reports))
        }
    }
}
