use serde::{Deserialize, Serialize};

use super::update::{activate, preactivation_into, Scratch};
use super::{basis, ParameterTensor, Weights};
use crate::error::{Error, Result};
use crate::instance::{IsingInstance, SpinConfig};
use crate::rng::{GaussianNoise, NoiseSource};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryOptions {
    /// Record per-step energies and the `x` / `h` matrices.
    pub trace: bool,
    /// Divide the fields fed to the update rule by the RMS coupling row norm.
    pub normalize_fields: bool,
}

impl TrajectoryOptions {
    pub fn traced() -> Self {
        TrajectoryOptions { trace: true, ..Default::default() }
    }
}

/// Outcome of one run of an Ising machine.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    /// Lowest energy among the per-step readouts.
    pub best_energy: f64,
    pub best_config: SpinConfig,
    /// First step at which `best_energy` was reached.
    pub best_step: usize,
    /// Steps actually executed.
    pub steps: usize,
    pub seed: Option<u64>,
    pub energy_trace: Option<Vec<f64>>,
    pub x_trace: Option<Vec<Vec<f64>>>,
    pub h_trace: Option<Vec<Vec<f64>>>,
    /// Step at which a non-finite state stopped the run.
    pub diverged_at: Option<usize>,
}

/// Tracks the best readout and optional traces; shared by all machines.
#[derive(Debug)]
pub(crate) struct Recorder<'a> {
    inst: &'a IsingInstance,
    trace: bool,
    last_spins: Vec<i8>,
    last_energy: f64,
    best_energy: f64,
    best_spins: Vec<i8>,
    best_step: usize,
    steps: usize,
    energies: Vec<f64>,
    xs: Vec<Vec<f64>>,
    hs: Vec<Vec<f64>>,
}

impl<'a> Recorder<'a> {
    pub(crate) fn new(inst: &'a IsingInstance, trace: bool) -> Self {
        Recorder {
            inst,
            trace,
            last_spins: Vec::new(),
            last_energy: f64::INFINITY,
            best_energy: f64::INFINITY,
            best_spins: Vec::new(),
            best_step: 0,
            steps: 0,
            energies: Vec::new(),
            xs: Vec::new(),
            hs: Vec::new(),
        }
    }

    /// Reads out `σ = sign(x)` and records step `t`.
    pub(crate) fn record(&mut self, t: usize, x: &[f64], h: Option<&[f64]>) {
        let spins_changed = self.last_spins.len() != x.len()
            || x.iter().zip(&self.last_spins).any(|(&v, &s)| (v < 0.0) != (s < 0));
        if spins_changed {
            self.last_spins.clear();
            self.last_spins.extend(x.iter().map(|&v| if v < 0.0 { -1i8 } else { 1 }));
            self.last_energy = self.inst.energy_unchecked(&self.last_spins);
        }
        if self.last_energy < self.best_energy {
            self.best_energy = self.last_energy;
            self.best_spins.clone_from(&self.last_spins);
            self.best_step = t;
        }
        self.steps = t + 1;
        if self.trace {
            self.energies.push(self.last_energy);
            self.xs.push(x.to_vec());
            if let Some(h) = h {
                self.hs.push(h.to_vec());
            }
        }
    }

    pub(crate) fn finish(self, seed: Option<u64>, diverged_at: Option<usize>) -> Result<TrajectoryResult> {
        if self.steps == 0 {
            return Err(Error::Diverged { step: diverged_at.unwrap_or(0) });
        }
        let trace = self.trace;
        Ok(TrajectoryResult {
            best_energy: self.best_energy,
            best_config: SpinConfig::new(self.best_spins).expect("readout is ±1"),
            best_step: self.best_step,
            steps: self.steps,
            seed,
            energy_trace: trace.then_some(self.energies),
            x_trace: trace.then_some(self.xs),
            h_trace: (trace && !self.hs.is_empty()).then_some(self.hs),
            diverged_at,
        })
    }
}

/// Runs the learned machine for `t_total` steps with Gaussian noise from `seed`.
pub fn run_trajectory(
    inst: &IsingInstance,
    params: &ParameterTensor,
    t_total: usize,
    seed: u64,
    trace: bool,
) -> Result<TrajectoryResult> {
    let options = TrajectoryOptions { trace, normalize_fields: false };
    let mut result = run_trajectory_with(inst, params, t_total, &GaussianNoise::new(seed), options)?;
    result.seed = Some(seed);
    Ok(result)
}

/// Runs the learned machine with an arbitrary noise source.
///
/// At every step `t`: `x(t)` is computed from the last `T_c` field vectors
/// (zero before `t = 0`), then `h(t) = J x(t) − l/2`, and the readout
/// `sign(x(t))` is scored. A non-finite state stops the run; the best
/// readout so far is returned with `diverged_at` set.
pub fn run_trajectory_with(
    inst: &IsingInstance,
    params: &ParameterTensor,
    t_total: usize,
    noise: &dyn NoiseSource,
    options: TrajectoryOptions,
) -> Result<TrajectoryResult> {
    if t_total == 0 {
        return Err(Error::InvalidParameter("t_total must be >= 1".into()));
    }
    let arch = *params.arch();
    let n = inst.n();
    let t_c = arch.t_c;
    let scale = if options.normalize_fields {
        let r = inst.rms_row_norm();
        if r > 0.0 {
            1.0 / r
        } else {
            1.0
        }
    } else {
        1.0
    };

    let mut history = vec![vec![0.0; n]; t_c];
    let mut head = 0usize; // slot of the oldest entry
    let mut weights = Weights::zeros(&arch);
    let mut scratch = Scratch::default();
    let mut eta = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut h = vec![0.0; n];
    let mut recorder = Recorder::new(inst, options.trace);
    let static_weights = arch.m == 1;
    if static_weights {
        params.weights_into(&basis::values(arch.basis, 1, 0.0), &mut weights);
    }
    let mut diverged_at = None;

    for t in 0..t_total {
        if !static_weights {
            let f = basis::values(arch.basis, arch.m, t as f64 / t_total as f64);
            params.weights_into(&f, &mut weights);
        }
        noise.fill(t, &mut eta);
        {
            let window: Vec<&[f64]> = (0..t_c).map(|s| history[(head + s) % t_c].as_slice()).collect();
            preactivation_into(&arch, &weights, &window, &eta, &mut scratch, &mut x);
        }
        for v in x.iter_mut() {
            *v = activate(arch.variant, *v);
        }
        if x.iter().any(|v| !v.is_finite()) {
            diverged_at = Some(t);
            break;
        }
        inst.fields_into(&x, &mut h);
        if h.iter().any(|v| !v.is_finite()) {
            diverged_at = Some(t);
            break;
        }
        recorder.record(t, &x, Some(&h));
        // Overwrite the oldest slot with the newest field.
        let slot = &mut history[head];
        for (dst, &src) in slot.iter_mut().zip(&h) {
            *dst = src * scale;
        }
        head = (head + 1) % t_c;
    }
    recorder.finish(None, diverged_at)
}
