use rayon::prelude::*;

use super::{reaches, EnergyLedger, RewardConfig};
use crate::error::{Error, Result};
use crate::instance::IsingInstance;
use crate::machine::{run_trajectory_with, ParameterTensor, TrajectoryOptions};
use crate::rng::{derive_seed, GaussianNoise, TAG_BENCH};

/// Best energies of repeated runs of a fixed model, one row per instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub ids: Vec<String>,
    pub energies: Vec<Vec<f64>>,
}

/// Runs `params` `runs` times on every instance. Run `r` on instance `k`
/// uses `derive_seed(seed, [TAG_BENCH, k, r])`; diverged runs score `+∞`.
pub fn evaluate(
    params: &ParameterTensor,
    instances: &[IsingInstance],
    runs: usize,
    t_total: usize,
    normalize_fields: bool,
    seed: u64,
) -> Result<Evaluation> {
    if runs == 0 || t_total == 0 {
        return Err(Error::InvalidParameter("runs and t_total must be >= 1".into()));
    }
    let options = TrajectoryOptions { trace: false, normalize_fields };
    let energies = instances
        .iter()
        .enumerate()
        .map(|(k, inst)| {
            (0..runs)
                .into_par_iter()
                .map(|r| {
                    let noise = GaussianNoise::new(derive_seed(seed, &[TAG_BENCH, k as u64, r as u64]));
                    match run_trajectory_with(inst, params, t_total, &noise, options) {
                        Ok(t) => Ok(t.best_energy),
                        Err(Error::Diverged { .. }) => Ok(f64::INFINITY),
                        Err(e) => Err(e),
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(Evaluation { ids: instances.iter().map(|i| i.id().to_string()).collect(), energies })
}

impl Evaluation {
    /// Target for instance `k`: the ledger entry, else the best energy of its runs.
    pub fn target(&self, k: usize, targets: &EnergyLedger) -> f64 {
        targets
            .get(&self.ids[k])
            .unwrap_or_else(|| self.energies[k].iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Mean reward over all runs against fixed targets.
    pub fn mean_reward(&self, targets: &EnergyLedger, reward: &RewardConfig, tau: f64) -> f64 {
        self.mean_over(targets, |e, e0| reward.reward(e, e0, tau))
    }

    /// Fraction of runs reaching their target.
    pub fn success_rate(&self, targets: &EnergyLedger) -> f64 {
        self.mean_over(targets, |e, e0| if reaches(e, e0) { 1.0 } else { 0.0 })
    }

    fn mean_over(&self, targets: &EnergyLedger, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (k, row) in self.energies.iter().enumerate() {
            let e0 = self.target(k, targets);
            sum += row.iter().map(|&e| f(e, e0)).sum::<f64>();
            count += row.len();
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}
