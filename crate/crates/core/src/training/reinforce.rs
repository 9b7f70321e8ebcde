use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::epoch::{batch_indices, histogram, score_batch};
use super::{tau_update, EnergyLedger, EpochReport, TrainSettings, TrainerState};
use crate::error::{Error, Result};
use crate::instance::IsingInstance;
use crate::machine::{basis_values, f_nl, ParameterTensor, Recorder, Variant, Weights};
use crate::rng::{derive_seed, GaussianNoise, NoiseSource, TAG_TRAJECTORY};

/// One rollout of the stochastic discrete machine.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRollout {
    pub best_energy: f64,
    /// `∇_θ Σ_{t,i} log P(x_i(t))` in trainable-vector coordinates.
    pub score: Vec<f64>,
}

/// Runs the discrete machine as a policy: each spin is `+1` with
/// probability `(1 + F)/2`, `F = tanh(a)`, instead of `sign(a)`.
pub fn policy_rollout(
    inst: &IsingInstance,
    params: &ParameterTensor,
    t_total: usize,
    seed: u64,
    normalize_fields: bool,
) -> Result<PolicyRollout> {
    let arch = *params.arch();
    if arch.variant != Variant::Discrete {
        return Err(Error::InvalidParameter("policy gradient needs the discrete variant".into()));
    }
    if t_total == 0 {
        return Err(Error::InvalidParameter("t_total must be >= 1".into()));
    }
    let n = inst.n();
    let t_c = arch.t_c;
    let d = arch.d;
    let scale = if normalize_fields && inst.rms_row_norm() > 0.0 { 1.0 / inst.rms_row_norm() } else { 1.0 };
    let noise = GaussianNoise::new(seed);
    let mut coin = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[TAG_TRAJECTORY]));
    let rows = arch.weight_rows();
    let mut history = vec![vec![0.0; n]; t_c];
    let mut head = 0usize;
    let mut weights = Weights::zeros(&arch);
    let mut eta = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut h = vec![0.0; n];
    let mut u = vec![0.0; d];
    let mut row_grad = vec![0.0; rows];
    let mut score = vec![0.0; arch.param_count()];
    let mut recorder = Recorder::new(inst, false);

    for t in 0..t_total {
        let f = basis_values(arch.basis, arch.m, t as f64 / t_total as f64);
        params.weights_into(&f, &mut weights);
        noise.fill(t, &mut eta);
        row_grad.fill(0.0);
        for i in 0..n {
            let past = |s: usize| history[(head + s) % t_c][i];
            let mut a = weights.w0 * eta[i];
            if d == 0 {
                for s in 0..t_c {
                    a += weights.w2[s] * past(s);
                }
            } else {
                for k in 0..d {
                    u[k] = (0..t_c).map(|s| weights.w2[k * t_c + s] * past(s)).sum();
                    a += weights.w1[k] * f_nl(u[k]);
                }
            }
            let p_up = a.tanh();
            if !p_up.is_finite() {
                return Ok(PolicyRollout { best_energy: f64::INFINITY, score: vec![0.0; score.len()] });
            }
            x[i] = if coin.random::<f64>() < (1.0 + p_up) / 2.0 { 1.0 } else { -1.0 };
            let g = x[i] - p_up;
            row_grad[0] += g * eta[i];
            if d == 0 {
                for s in 0..t_c {
                    row_grad[1 + s] += g * past(s);
                }
            } else {
                for k in 0..d {
                    row_grad[1 + k] += g * f_nl(u[k]);
                    let th = u[k].tanh();
                    let chain = g * weights.w1[k] * (2.0 - th * th);
                    for s in 0..t_c {
                        row_grad[1 + d + k * t_c + s] += chain * past(s);
                    }
                }
            }
        }
        for (row, &gr) in row_grad.iter().enumerate() {
            for (mode, &fm) in f.iter().enumerate() {
                if let Some(idx) = ParameterTensor::flat_index(&arch, row, mode) {
                    score[idx] += gr * fm;
                }
            }
        }
        inst.fields_into(&x, &mut h);
        recorder.record(t, &x, None);
        for (dst, &src) in history[head].iter_mut().zip(&h) {
            *dst = src * scale;
        }
        head = (head + 1) % t_c;
    }
    let best_energy = recorder.finish(Some(seed), None)?.best_energy;
    Ok(PolicyRollout { best_energy, score })
}

/// One REINFORCE epoch on the mean weights `θ_x` (no baseline); `θ_L` is unused.
pub fn reinforce_epoch(
    state: &mut TrainerState,
    instances: &[IsingInstance],
    settings: &TrainSettings,
    ledger: &mut EnergyLedger,
) -> Result<EpochReport> {
    let start = Instant::now();
    let epoch = state.epoch + 1;
    let (b, r) = (settings.budget.b, settings.budget.r);
    let batch = batch_indices(settings.seed, epoch, instances.len(), b)?;
    let params = state.params(&settings.arch)?;
    let jobs: Vec<(usize, usize)> = (0..b).flat_map(|bi| (0..r).map(move |ri| (bi, ri))).collect();
    let rollouts: Vec<Result<PolicyRollout>> = jobs
        .par_iter()
        .map(|&(bi, ri)| {
            let seed = derive_seed(settings.seed, &[TAG_TRAJECTORY, epoch as u64, bi as u64, ri as u64]);
            policy_rollout(&instances[batch[bi]], &params, settings.budget.t_total, seed, settings.normalize_fields)
        })
        .collect();
    let rollouts: Vec<PolicyRollout> = rollouts.into_iter().collect::<Result<_>>()?;
    let ids: Vec<&str> = jobs.iter().map(|&(bi, _)| instances[batch[bi]].id()).collect();
    let energies: Vec<f64> = rollouts.iter().map(|r| r.best_energy).collect();
    let tau = state.tau;
    let (rewards, ledger_updates) = score_batch(&ids, &energies, &settings.reward, tau, ledger);
    let grad = reinforce_gradient(&rollouts, &rewards);
    if let Some(index) = grad.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    for (w, g) in state.theta_x.iter_mut().zip(&grad) {
        *w += settings.optimizer.eta_x * g;
    }
    let mean_reward = rewards.iter().sum::<f64>() / rewards.len() as f64;
    state.tau = tau_update(tau, epoch, mean_reward, &settings.reward);
    state.epoch = epoch;
    Ok(EpochReport {
        epoch,
        mean_reward,
        reward_histogram: histogram(settings.reward.kind, &rewards),
        tau,
        grad_norm_x: grad.iter().map(|v| v * v).sum::<f64>().sqrt(),
        grad_norm_l: 0.0,
        ledger_updates,
        diverged: energies.iter().filter(|e| !e.is_finite()).count(),
        trajectories: rewards.len(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// `mean(ρ · score)` in rollout order.
pub fn reinforce_gradient(rollouts: &[PolicyRollout], rewards: &[f64]) -> Vec<f64> {
    let p = rollouts.first().map_or(0, |r| r.score.len());
    let mut g = vec![0.0; p];
    let count = rollouts.len() as f64;
    for (ro, &rho) in rollouts.iter().zip(rewards) {
        for (gi, si) in g.iter_mut().zip(&ro.score) {
            *gi += rho * si / count;
        }
    }
    g
}
