use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::IsingInstance;
use crate::machine::{Architecture, IsingMachine, ParameterTensor, Recorder, TrajectoryResult, Variant};
use crate::rng::{rng_for, TabulatedNoise, TAG_TRAJECTORY};

/// Analog iterative machine with constant damping and momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AimConfig {
    pub dt: f64,
    /// Field strength.
    pub alpha: f64,
    /// Damping.
    pub beta: f64,
    /// Momentum.
    pub gamma: f64,
    pub t_total: usize,
}

impl Default for AimConfig {
    fn default() -> Self {
        super::baseline_defaults().aim
    }
}

impl AimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("aim dt must be positive, got {}", self.dt)));
        }
        if ![self.alpha, self.beta, self.gamma].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("aim parameters must be finite".into()));
        }
        if self.t_total == 0 {
            return Err(Error::InvalidParameter("aim t_total must be >= 1".into()));
        }
        Ok(())
    }

    /// Coefficients of `z(t+1) = a1 z(t) + a2 z(t−1) + u(t)`.
    fn recursion(&self) -> (f64, f64) {
        (1.0 + self.dt * (self.gamma - self.beta), -self.dt * self.gamma)
    }
}

/// A run together with its internal `z` states.
#[derive(Debug, Clone, PartialEq)]
pub struct AimRun {
    pub result: TrajectoryResult,
    pub z_trace: Option<Vec<Vec<f64>>>,
}

/// `z(0)` and `z(1)`, independent standard Gaussians.
pub fn aim_initial_state(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = rng_for(seed, &[TAG_TRAJECTORY]);
    let z0 = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let z1 = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    (z0, z1)
}

pub fn aim_run(inst: &IsingInstance, cfg: &AimConfig, seed: u64) -> Result<TrajectoryResult> {
    let (z0, z1) = aim_initial_state(inst.n(), seed);
    let mut run = aim_run_from(inst, cfg, &z0, &z1, false)?;
    run.result.seed = Some(seed);
    Ok(run.result)
}

/// Iterates `z(t+1) = z(t) + dt (−α h(t) − β z(t) + γ (z(t) − z(t−1)))` for
/// `t ≥ 1`, with `h(t)` the field at `x = tanh(z(t))`. Readout is `sign(z)`
/// and the recorded `x` trace is `tanh(z)`.
pub fn aim_run_from(
    inst: &IsingInstance,
    cfg: &AimConfig,
    z0: &[f64],
    z1: &[f64],
    trace: bool,
) -> Result<AimRun> {
    cfg.validate()?;
    let n = inst.n();
    for z in [z0, z1] {
        if z.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: z.len() });
        }
    }
    let mut recorder = Recorder::new(inst, trace);
    let mut z_trace = trace.then(Vec::new);
    let mut x = vec![0.0; n];
    let mut h = vec![0.0; n];
    let mut prev = z0.to_vec();
    let mut cur = z1.to_vec();
    let mut diverged_at = None;

    let mut observe = |t: usize, z: &[f64], x: &mut [f64], h: &mut [f64], recorder: &mut Recorder| {
        for (xi, zi) in x.iter_mut().zip(z) {
            *xi = zi.tanh();
        }
        inst.fields_into(x, h);
        recorder.record(t, x, Some(h));
        if let Some(zs) = z_trace.as_mut() {
            zs.push(z.to_vec());
        }
    };

    observe(0, &prev, &mut x, &mut h, &mut recorder);
    if cfg.t_total > 1 {
        observe(1, &cur, &mut x, &mut h, &mut recorder);
    }
    for t in 2..cfg.t_total {
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let z = cur[i];
                z + cfg.dt * (-cfg.alpha * h[i] - cfg.beta * z + cfg.gamma * (z - prev[i]))
            })
            .collect();
        if next.iter().any(|v| !v.is_finite()) {
            diverged_at = Some(t);
            break;
        }
        prev = std::mem::replace(&mut cur, next);
        observe(t, &cur, &mut x, &mut h, &mut recorder);
    }
    let result = recorder.finish(None, diverged_at)?;
    Ok(AimRun { result, z_trace })
}

impl IsingMachine for AimConfig {
    fn name(&self) -> String {
        "aim".into()
    }

    fn run(&self, inst: &IsingInstance, t_total: usize, seed: u64) -> Result<TrajectoryResult> {
        aim_run(inst, &AimConfig { t_total, ..*self }, seed)
    }
}

/// Closed form of the AIM recursion as a convolution over past fields.
#[derive(Debug, Clone, PartialEq)]
pub struct AimKernel {
    /// `weights[k − 1]` multiplies `h(t − k)`.
    pub weights: Vec<f64>,
    /// Impulse response `g(k)` of the homogeneous recursion, `k = 0..len`.
    pub impulse: Vec<f64>,
    /// Roots of `λ² − a1 λ − a2`.
    pub eigenvalues: [Complex64; 2],
    /// The roots (nearly) coincide and the repeated-root form was used.
    pub degenerate: bool,
}

impl AimKernel {
    fn g(&self, k: isize) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.impulse[k as usize]
        }
    }
}

/// Convolution weights over past fields implied by the eigenvalues of the
/// AIM recursion.
///
/// With `a1 = 1 + dt(γ − β)` and `a2 = −dt γ` the impulse response is
/// `g(k) = (λ₁^{k+1} − λ₂^{k+1}) / (λ₁ − λ₂)` and a field seen `k` steps ago
/// enters `z` with weight `−α dt g(k − 1)`.
pub fn aim_explicit_kernel(cfg: &AimConfig, t_total: usize) -> Result<AimKernel> {
    if t_total == 0 {
        return Err(Error::InvalidParameter("kernel length must be >= 1".into()));
    }
    let (a1, a2) = cfg.recursion();
    let root = Complex64::new(a1 * a1 + 4.0 * a2, 0.0).sqrt();
    let l1 = (a1 + root) / 2.0;
    let l2 = (a1 - root) / 2.0;
    let scale = l1.norm().max(l2.norm()).max(1.0);
    let degenerate = (l1 - l2).norm() <= 1e-6 * scale;
    let impulse: Vec<f64> = (0..=t_total as u32)
        .map(|k| {
            if degenerate {
                // Divided difference expanded as a sum; equals (k+1) λ^k at coincidence.
                (0..=k).map(|j| l1.powu(j) * l2.powu(k - j)).sum::<Complex64>().re
            } else {
                ((l1.powu(k + 1) - l2.powu(k + 1)) / (l1 - l2)).re
            }
        })
        .collect();
    let weights = (0..t_total).map(|k| -cfg.alpha * cfg.dt * impulse[k]).collect();
    Ok(AimKernel { weights, impulse, eigenvalues: [l1, l2], degenerate })
}

/// Reconstructs the `z` trace from the kernel instead of iterating.
///
/// `z(t) = g(t−1) z(1) + a2 g(t−2) z(0) + Σ_{j=1}^{t−1} w(t − j) h(j)` for `t ≥ 2`.
pub fn aim_explicit_run(
    inst: &IsingInstance,
    cfg: &AimConfig,
    z0: &[f64],
    z1: &[f64],
    t_total: usize,
) -> Result<Vec<Vec<f64>>> {
    let kernel = aim_explicit_kernel(cfg, t_total)?;
    let (_, a2) = cfg.recursion();
    let n = inst.n();
    let mut zs: Vec<Vec<f64>> = vec![z0.to_vec(), z1.to_vec()];
    zs.truncate(t_total);
    let mut hs: Vec<Vec<f64>> = Vec::with_capacity(t_total);
    for z in &zs {
        hs.push(inst.fields(&z.iter().map(|v| v.tanh()).collect::<Vec<_>>())?);
    }
    for t in 2..t_total {
        let ti = t as isize;
        let (c1, c0) = (kernel.g(ti - 1), a2 * kernel.g(ti - 2));
        let mut z: Vec<f64> = (0..n).map(|i| c1 * z1[i] + c0 * z0[i]).collect();
        for (j, h) in hs.iter().enumerate().skip(1) {
            let w = kernel.weights[t - j - 1];
            for (zi, hi) in z.iter_mut().zip(h) {
                *zi += w * hi;
            }
        }
        hs.push(inst.fields(&z.iter().map(|v| v.tanh()).collect::<Vec<_>>())?);
        zs.push(z);
    }
    Ok(zs)
}

/// Single-layer continuous machine with `T_c = t_total` whose history weights
/// are the AIM kernel and whose noise weight is 1.
pub fn aim_as_npim(cfg: &AimConfig, t_total: usize) -> Result<ParameterTensor> {
    let kernel = aim_explicit_kernel(cfg, t_total)?;
    let arch = Architecture::new(t_total, 0, 1, Variant::Continuous)?;
    let mut flat = Vec::with_capacity(arch.param_count());
    flat.push(1.0);
    flat.extend((0..t_total).map(|s| kernel.weights[t_total - s - 1]));
    ParameterTensor::from_flat(arch, &flat)
}

/// The noise table that feeds [`aim_as_npim`] the AIM initial conditions.
///
/// The kernel would also weight `h(0)`, which the recursion never uses
/// (`z(1)` is drawn at random), so the drive cancels that term.
pub fn aim_drive(inst: &IsingInstance, cfg: &AimConfig, z0: &[f64], z1: &[f64], t_total: usize) -> Result<TabulatedNoise> {
    let kernel = aim_explicit_kernel(cfg, t_total)?;
    let (_, a2) = cfg.recursion();
    let h0 = inst.fields(&z0.iter().map(|v| v.tanh()).collect::<Vec<_>>())?;
    let mut rows = vec![z0.to_vec()];
    for t in 1..t_total as isize {
        let (c1, c0, ch) = (kernel.g(t - 1), a2 * kernel.g(t - 2), cfg.alpha * cfg.dt * kernel.g(t - 1));
        rows.push((0..inst.n()).map(|i| c1 * z1[i] + c0 * z0[i] + ch * h0[i]).collect());
    }
    Ok(TabulatedNoise { rows })
}
