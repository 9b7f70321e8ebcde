use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    apply_update, estimate_gradients, tau_update, Budget, EnergyLedger, PerturbationSample, RewardConfig, RewardKind,
    TrainSettings, TrainerState,
};
use crate::error::{Error, Result};
use crate::instance::IsingInstance;
use crate::machine::{run_trajectory_with, ParameterTensor, TrajectoryOptions};
use crate::rng::{derive_seed, rng_for, GaussianNoise, TAG_BATCH, TAG_PERTURBATION, TAG_TRAJECTORY};

/// Summary of one training epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochReport {
    /// 1-based epoch index.
    pub epoch: usize,
    pub mean_reward: f64,
    /// Success reward: counts of `−1/2, 0, 1`. Objective reward: ten equal bins on `[0, 1]`.
    pub reward_histogram: Vec<usize>,
    /// `τ` used for this epoch's rewards.
    pub tau: f64,
    pub grad_norm_x: f64,
    pub grad_norm_l: f64,
    /// Ledger entries created or lowered.
    pub ledger_updates: usize,
    /// Trajectories that stopped on a non-finite state.
    pub diverged: usize,
    pub trajectories: usize,
    pub seconds: f64,
}

impl EpochReport {
    pub const CSV_HEADER: &'static str = "epoch,mean_reward,tau,grad_norm_x,grad_norm_L,ledger_updates,seconds";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6}",
            self.epoch, self.mean_reward, self.tau, self.grad_norm_x, self.grad_norm_l, self.ledger_updates, self.seconds
        )
    }
}

/// Writes a header and one row per report.
pub fn write_epoch_csv<W: Write>(reports: &[EpochReport], mut out: W) -> Result<()> {
    writeln!(out, "{}", EpochReport::CSV_HEADER)?;
    for r in reports {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

pub(crate) fn histogram(kind: RewardKind, rewards: &[f64]) -> Vec<usize> {
    match kind {
        RewardKind::Success => {
            let mut h = vec![0; 3];
            for &r in rewards {
                let slot = if r < -0.25 {
                    0
                } else if r < 0.5 {
                    1
                } else {
                    2
                };
                h[slot] += 1;
            }
            h
        }
        RewardKind::Objective => {
            let mut h = vec![0; 10];
            for &r in rewards {
                h[((r * 10.0) as usize).min(9)] += 1;
            }
            h
        }
    }
}

/// The `B` instance indices used in `epoch`, sampled without replacement.
pub(crate) fn batch_indices(seed: u64, epoch: usize, pool: usize, b: usize) -> Result<Vec<usize>> {
    if pool < b {
        return Err(Error::InvalidParameter(format!("need at least B = {b} instances, have {pool}")));
    }
    let mut idx: Vec<usize> = (0..pool).collect();
    let mut rng = rng_for(seed, &[TAG_BATCH, epoch as u64]);
    let (chosen, _) = idx.partial_shuffle(&mut rng, b);
    Ok(chosen.to_vec())
}

/// Rewards of one batch against the epoch-start ledger; the ledger is
/// updated afterwards. Returns `(rewards, ledger_updates)`.
///
/// An instance not yet in the ledger is scored against the best energy of
/// this batch. Runs that diverged (`e_opt = +∞`) get the lowest reward.
pub(crate) fn score_batch(
    ids: &[&str],
    energies: &[f64],
    reward: &RewardConfig,
    tau: f64,
    ledger: &mut EnergyLedger,
) -> (Vec<f64>, usize) {
    let mut batch_best: BTreeMap<&str, f64> = BTreeMap::new();
    for (&id, &e) in ids.iter().zip(energies) {
        let slot = batch_best.entry(id).or_insert(f64::INFINITY);
        *slot = slot.min(e);
    }
    let worst = match reward.kind {
        RewardKind::Success => -0.5,
        RewardKind::Objective => 0.0,
    };
    let rewards = ids
        .iter()
        .zip(energies)
        .map(|(&id, &e)| {
            if !e.is_finite() {
                return worst;
            }
            let e0 = ledger.get(id).unwrap_or(batch_best[id]);
            reward.reward(e, e0, tau)
        })
        .collect();
    let updates = batch_best.iter().filter(|(id, &e)| e.is_finite() && ledger.update(id, e)).count();
    (rewards, updates)
}

/// Best energy of one trajectory, `+∞` if it diverged at the first step.
pub(crate) fn trajectory_energy(
    inst: &IsingInstance,
    params: &ParameterTensor,
    settings: &TrainSettings,
    seed: u64,
) -> Result<f64> {
    let options = TrajectoryOptions { trace: false, normalize_fields: settings.normalize_fields };
    match run_trajectory_with(inst, params, settings.budget.t_total, &GaussianNoise::new(seed), options) {
        Ok(r) => Ok(r.best_energy),
        Err(Error::Diverged { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// One epoch: `B` instances × `R` perturbations, estimate, update, schedule.
pub fn train_epoch(
    state: &mut TrainerState,
    instances: &[IsingInstance],
    settings: &TrainSettings,
    ledger: &mut EnergyLedger,
) -> Result<EpochReport> {
    let start = Instant::now();
    let epoch = state.epoch + 1;
    let Budget { b, r, .. } = settings.budget;
    let p = state.dim();
    if p != settings.arch.param_count() {
        return Err(Error::DimensionMismatch { expected: settings.arch.param_count(), actual: p });
    }
    let batch = batch_indices(settings.seed, epoch, instances.len(), b)?;
    let jobs: Vec<(usize, usize)> = (0..b).flat_map(|bi| (0..r).map(move |ri| (bi, ri))).collect();
    let frozen = &*state;
    let outcomes: Vec<Result<(Vec<f64>, u64, f64)>> = jobs
        .par_iter()
        .map(|&(bi, ri)| {
            let path = [epoch as u64, bi as u64, ri as u64];
            let mut rng = rng_for(settings.seed, &[TAG_PERTURBATION, path[0], path[1], path[2]]);
            let v: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
            let params = ParameterTensor::from_flat(settings.arch, &frozen.perturbed(&v))?;
            let seed = derive_seed(settings.seed, &[TAG_TRAJECTORY, path[0], path[1], path[2]]);
            let e = trajectory_energy(&instances[batch[bi]], &params, settings, seed)?;
            Ok((v, seed, e))
        })
        .collect();
    let mut vs = Vec::with_capacity(jobs.len());
    let mut seeds = Vec::with_capacity(jobs.len());
    let mut energies = Vec::with_capacity(jobs.len());
    for o in outcomes {
        let (v, s, e) = o?;
        vs.push(v);
        seeds.push(s);
        energies.push(e);
    }
    let ids: Vec<&str> = jobs.iter().map(|&(bi, _)| instances[batch[bi]].id()).collect();
    let tau = state.tau;
    let (rewards, ledger_updates) = score_batch(&ids, &energies, &settings.reward, tau, ledger);
    let samples: Vec<PerturbationSample> = vs
        .into_iter()
        .zip(&rewards)
        .zip(ids.iter().zip(&seeds))
        .map(|((v, &reward), (&id, &seed))| PerturbationSample { v, reward, instance: id.to_string(), seed })
        .collect();
    let grads = estimate_gradients(&samples, &state.theta_l, settings.optimizer.centering)?;
    apply_update(state, &grads, &settings.optimizer)?;
    let mean_reward = rewards.iter().sum::<f64>() / rewards.len() as f64;
    state.tau = tau_update(tau, epoch, mean_reward, &settings.reward);
    state.epoch = epoch;
    Ok(EpochReport {
        epoch,
        mean_reward,
        reward_histogram: histogram(settings.reward.kind, &rewards),
        tau,
        grad_norm_x: grads.norm_x(),
        grad_norm_l: grads.norm_l(),
        ledger_updates,
        diverged: energies.iter().filter(|e| !e.is_finite()).count(),
        trajectories: rewards.len(),
        seconds: start.elapsed().as_secs_f64(),
    })
}


/// Result of a training run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub state: TrainerState,
    pub reports: Vec<EpochReport>,
}

impl TrainOutcome {
    /// The distribution mean as a parameter tensor.
    pub fn model(&self, settings: &TrainSettings) -> Result<ParameterTensor> {
        self.state.params(&settings.arch)
    }
}

/// Trains for `settings.budget.epochs` epochs.
///
/// With `init` the mean starts from those weights and `θ_L` is reset to
/// `σ₀ I`; otherwise the state is freshly initialized from the seed.
pub fn train(
    settings: &TrainSettings,
    instances: &[IsingInstance],
    ledger: &mut EnergyLedger,
    init: Option<&ParameterTensor>,
    on_epoch: &mut dyn FnMut(&EpochReport, &TrainerState),
) -> Result<TrainOutcome> {
    settings.validate()?;
    let mut state = match init {
        Some(p) => {
            if p.arch() != &settings.arch {
                return Err(Error::IncompatibleArchitecture(format!(
                    "model has {:?}, config has {:?}",
                    p.arch(),
                    settings.arch
                )));
            }
            TrainerState::from_mean(p.to_flat(), &settings.optimizer, settings.reward.tau0)
        }
        None => TrainerState::init(&settings.arch, &settings.optimizer, settings.reward.tau0, settings.seed),
    };
    let mut reports = Vec::with_capacity(settings.budget.epochs);
    for _ in 0..settings.budget.epochs {
        let report = train_epoch(&mut state, instances, settings, ledger)?;
        on_epoch(&report, &state);
        reports.push(report);
    }
    Ok(TrainOutcome { state, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen_sk;
    use crate::machine::{Architecture, Variant};
    use crate::training::OptimizerConfig;

    fn settings(b: usize, r: usize, epochs: usize) -> TrainSettings {
        TrainSettings {
            arch: Architecture::new(3, 1, 1, Variant::Discrete).unwrap(),
            reward: RewardConfig::default(),
            budget: Budget { epochs, b, r, t_total: 15 },
            optimizer: OptimizerConfig::default(),
            normalize_fields: false,
            seed: 42,
        }
    }

    fn pool(k: usize) -> Vec<IsingInstance> {
        (0..k).map(|s| gen_sk(8, s as u64).unwrap()).collect()
    }

    #[test]
    fn counts_and_determinism() {
        let s = settings(2, 3, 2);
        let insts = pool(4);
        let run = || {
            let mut ledger = EnergyLedger::new();
            let mut out = train(&s, &insts, &mut ledger, None, &mut |_, _| {}).unwrap();
            for r in out.reports.iter_mut() {
                r.seconds = 0.0;
            }
            (out, ledger)
        };
        let (a, la) = run();
        let (b, lb) = run();
        assert_eq!(a.reports, b.reports);
        assert_eq!(a.state, b.state);
        assert_eq!(la, lb);
        assert!(a.reports.iter().all(|r| r.trajectories == 6));
        assert_eq!(a.reports[0].reward_histogram.iter().sum::<usize>(), 6);
        assert!(la.len() <= 4 && la.len() >= 2);
    }

    #[test]
    fn fine_tune_with_zero_epochs_keeps_weights() {
        let s = settings(2, 2, 0);
        let flat: Vec<f64> = (0..s.arch.param_count()).map(|i| i as f64 * 0.1).collect();
        let p = ParameterTensor::from_flat(s.arch, &flat).unwrap();
        let out = train(&s, &pool(2), &mut EnergyLedger::new(), Some(&p), &mut |_, _| {}).unwrap();
        assert_eq!(out.model(&s).unwrap(), p);
        let other = ParameterTensor::zeros(Architecture::new(2, 1, 1, Variant::Discrete).unwrap());
        assert!(matches!(
            train(&s, &pool(2), &mut EnergyLedger::new(), Some(&other), &mut |_, _| {}),
            Err(Error::IncompatibleArchitecture(_))
        ));
    }

    #[test]
    fn batch_needs_enough_instances() {
        let s = settings(5, 1, 1);
        assert!(train(&s, &pool(2), &mut EnergyLedger::new(), None, &mut |_, _| {}).is_err());
        let idx = batch_indices(1, 3, 10, 10).unwrap();
        let mut sorted = idx.clone();
        sorted.sort();
        assert_eq!(sorted, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn scoring_uses_epoch_start_ledger() {
        let mut ledger = EnergyLedger::new();
        ledger.update("a", -10.0);
        let cfg = RewardConfig::default();
        let (r, updates) = score_batch(&["a", "a", "b", "b"], &[-10.0, -12.0, -3.0, -4.0], &cfg, 0.005, &mut ledger);
        // "a": −12 beats the stored −10; "b" is new and scored against its batch best −4.
        assert_eq!(r, vec![1.0, 1.0, 0.0, 1.0]);
        assert_eq!(updates, 2);
        assert_eq!(ledger.get("a"), Some(-12.0));
        assert_eq!(ledger.get("b"), Some(-4.0));
        let (r, _) = score_batch(&["a"], &[f64::INFINITY], &cfg, 0.005, &mut ledger);
        assert_eq!(r, vec![-0.5]);
    }

    #[test]
    fn csv_row_format() {
        let r = EpochReport {
            epoch: 3,
            mean_reward: 0.25,
            reward_histogram: vec![1, 2, 1],
            tau: 0.005,
            grad_norm_x: 1.5,
            grad_norm_l: 2.0,
            ledger_updates: 1,
            diverged: 0,
            trajectories: 4,
            seconds: 0.5,
        };
        let mut buf = Vec::new();
        write_epoch_csv(&[r], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "epoch,mean_reward,tau,grad_norm_x,grad_norm_L,ledger_updates,seconds\n3,0.25,0.005,1.5,2,1,0.500000\n"
        );
    }
}
