use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardKind {
    /// `1` on reaching the best known energy, `−1/2` for poor runs, else `0`.
    #[default]
    Success,
    /// `max(0, 1 − τ (E_opt − E_0))`.
    Objective,
}

impl RewardKind {
    pub fn name(&self) -> &'static str {
        match self {
            RewardKind::Success => "success",
            RewardKind::Objective => "objective",
        }
    }
}

/// Reward shape and the `τ` schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardConfig {
    pub kind: RewardKind,
    pub tau0: f64,
    pub tau_factor: f64,
    /// `τ` may only change at epochs that are multiples of this.
    pub tau_period: usize,
    /// Mean reward above which `τ` is sharpened.
    pub mean_threshold: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig { kind: RewardKind::Success, tau0: 0.005, tau_factor: 1.5, tau_period: 10, mean_threshold: 0.5 }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau0 > 0.0 && self.tau0.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau0 must be positive, got {}", self.tau0)));
        }
        if !(self.tau_factor >= 1.0 && self.tau_factor.is_finite()) {
            return Err(Error::InvalidParameter("tau_factor must be >= 1".into()));
        }
        if self.tau_period == 0 {
            return Err(Error::InvalidParameter("tau_period must be >= 1".into()));
        }
        Ok(())
    }

    pub fn reward(&self, e_opt: f64, e_0: f64, tau: f64) -> f64 {
        match self.kind {
            RewardKind::Success => reward_success(e_opt, e_0),
            RewardKind::Objective => reward_objective(e_opt, e_0, tau),
        }
    }
}

/// Whether `e_opt` meets or beats `e_0` up to a relative tolerance of `1e−9`.
pub fn reaches(e_opt: f64, e_0: f64) -> bool {
    e_opt <= e_0 + 1e-9 * e_0.abs().max(1.0)
}

/// `1` if `e_opt` reaches `e_0`, `−1/2` if `e_opt ≥ e_0 / 2`, otherwise `0`.
///
/// The middle case assumes `e_0 < 0`.
pub fn reward_success(e_opt: f64, e_0: f64) -> f64 {
    if reaches(e_opt, e_0) {
        1.0
    } else if e_opt >= e_0 / 2.0 {
        -0.5
    } else {
        0.0
    }
}

/// `max(0, 1 − τ (e_opt − e_0))`.
pub fn reward_objective(e_opt: f64, e_0: f64, tau: f64) -> f64 {
    let r = 1.0 - tau * (e_opt - e_0);
    if r.is_nan() {
        0.0
    } else {
        r.clamp(0.0, 1.0)
    }
}

/// `τ` after completing epoch `epoch` (1-based) with the given mean reward.
pub fn tau_update(tau: f64, epoch: usize, mean_reward: f64, cfg: &RewardConfig) -> f64 {
    if epoch > 0 && epoch % cfg.tau_period == 0 && mean_reward > cfg.mean_threshold {
        tau * cfg.tau_factor
    } else {
        tau
    }
}
