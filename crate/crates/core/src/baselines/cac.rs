use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::IsingInstance;
use crate::machine::{IsingMachine, Recorder, TrajectoryResult};
use crate::rng::{rng_for, TAG_TRAJECTORY};

/// Chaotic amplitude control with one error variable per spin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacConfig {
    pub dt: f64,
    /// Linear gain; negative values make `±√(−a)` stable when uncoupled.
    pub a: f64,
    /// Coupling strength.
    pub xi: f64,
    /// Error-variable rate.
    pub beta: f64,
    pub t_total: usize,
}

impl Default for CacConfig {
    fn default() -> Self {
        super::baseline_defaults().cac
    }
}

impl CacConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("cac dt must be positive, got {}", self.dt)));
        }
        if ![self.a, self.xi, self.beta].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("cac parameters must be finite".into()));
        }
        if self.t_total == 0 {
            return Err(Error::InvalidParameter("cac t_total must be >= 1".into()));
        }
        Ok(())
    }
}

pub fn cac_run(inst: &IsingInstance, cfg: &CacConfig, seed: u64) -> Result<TrajectoryResult> {
    cac_run_traced(inst, cfg, seed, false)
}

/// Iterates
///
/// ```text
/// x ← x + dt (−a x − x³ − ξ e h(x))
/// e ← e + dt β e (1 − x²)
/// ```
///
/// from `x(0) ~ N(0, 1)`, `e(0) = 1`, both updates using the old `x`.
/// Step 0 reads out `x(0)`; `t_total` readouts in total.
pub fn cac_run_traced(inst: &IsingInstance, cfg: &CacConfig, seed: u64, trace: bool) -> Result<TrajectoryResult> {
    cfg.validate()?;
    let n = inst.n();
    let mut rng = rng_for(seed, &[TAG_TRAJECTORY]);
    let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut e = vec![1.0; n];
    let mut h = vec![0.0; n];
    let mut recorder = Recorder::new(inst, trace);
    let mut diverged_at = None;

    inst.fields_into(&x, &mut h);
    recorder.record(0, &x, Some(&h));
    for t in 1..cfg.t_total {
        for i in 0..n {
            let xi = x[i];
            x[i] = xi + cfg.dt * (-cfg.a * xi - xi * xi * xi - cfg.xi * e[i] * h[i]);
            e[i] += cfg.dt * cfg.beta * e[i] * (1.0 - xi * xi);
        }
        if x.iter().chain(&e).any(|v| !v.is_finite()) {
            diverged_at = Some(t);
            break;
        }
        inst.fields_into(&x, &mut h);
        recorder.record(t, &x, Some(&h));
    }
    let mut result = recorder.finish(Some(seed), diverged_at)?;
    result.seed = Some(seed);
    Ok(result)
}

impl IsingMachine for CacConfig {
    fn name(&self) -> String {
        "cac".into()
    }

    fn run(&self, inst: &IsingInstance, t_total: usize, seed: u64) -> Result<TrajectoryResult> {
        cac_run(inst, &CacConfig { t_total, ..*self }, seed)
    }
}
