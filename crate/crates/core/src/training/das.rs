use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{Architecture, ParameterTensor};
use crate::rng::{rng_for, TAG_INIT};

/// How the exploration-matrix estimator weights the identity term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// `L⁻ᵀ · mean(v vᵀ ρ − I)`.
    Literal,
    /// `L⁻ᵀ · mean((v vᵀ − I) ρ)`, the score-function gradient.
    RewardCentered,
}

/// Step sizes and initialization of the search distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub eta_x: f64,
    #[serde(rename = "eta_L")]
    pub eta_l: f64,
    /// Initial exploration scale, `θ_L = σ₀ I`.
    pub sigma0: f64,
    /// Floor on the singular values of `θ_L`.
    #[serde(rename = "eps_L")]
    pub eps_l: f64,
    pub centering: Centering,
    /// Standard deviation of the initial mean `θ_x`.
    pub init_std: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            eta_x: 0.05,
            eta_l: 0.01,
            sigma0: 0.3,
            eps_l: 1e-4,
            centering: Centering::RewardCentered,
            init_std: 0.1,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eta_x", self.eta_x), ("eta_L", self.eta_l), ("sigma0", self.sigma0), ("eps_L", self.eps_l)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.sigma0 < self.eps_l || self.eps_l <= 0.0 {
            return Err(Error::InvalidParameter("need 0 < eps_L <= sigma0".into()));
        }
        if !(self.init_std >= 0.0 && self.init_std.is_finite()) {
            return Err(Error::InvalidParameter("init_std must be >= 0".into()));
        }
        Ok(())
    }
}

/// Gaussian search distribution `θ = θ_x + θ_L v`, `v ~ N(0, I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainerState {
    pub theta_x: Vec<f64>,
    pub theta_l: DMatrix<f64>,
    /// Completed epochs.
    pub epoch: usize,
    pub tau: f64,
}

impl TrainerState {
    /// Fresh state: `θ_x ~ N(0, init_std²)` from `seed`, `θ_L = σ₀ I`.
    pub fn init(arch: &Architecture, cfg: &OptimizerConfig, tau0: f64, seed: u64) -> Self {
        let mut rng = rng_for(seed, &[TAG_INIT]);
        let theta_x = (0..arch.param_count())
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * cfg.init_std
            })
            .collect();
        Self::from_mean(theta_x, cfg, tau0)
    }

    /// Given mean with `θ_L = σ₀ I`.
    pub fn from_mean(theta_x: Vec<f64>, cfg: &OptimizerConfig, tau0: f64) -> Self {
        let p = theta_x.len();
        TrainerState { theta_x, theta_l: DMatrix::identity(p, p) * cfg.sigma0, epoch: 0, tau: tau0 }
    }

    pub fn dim(&self) -> usize {
        self.theta_x.len()
    }

    /// `θ_x + θ_L v`.
    pub fn perturbed(&self, v: &[f64]) -> Vec<f64> {
        let lv = &self.theta_l * DVector::from_column_slice(v);
        self.theta_x.iter().zip(lv.iter()).map(|(a, b)| a + b).collect()
    }

    pub fn params(&self, arch: &Architecture) -> Result<ParameterTensor> {
        ParameterTensor::from_flat(*arch, &self.theta_x)
    }
}

/// One evaluated perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSample {
    pub v: Vec<f64>,
    pub reward: f64,
    pub instance: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub g_x: DVector<f64>,
    pub g_l: DMatrix<f64>,
}

impl Gradients {
    pub fn norm_x(&self) -> f64 {
        self.g_x.norm()
    }

    /// Frobenius norm.
    pub fn norm_l(&self) -> f64 {
        self.g_l.norm()
    }
}

/// Zeroth-order gradient estimates for the mean and the exploration matrix.
///
/// `g_x = L⁻ᵀ mean(v ρ)`; `g_L` according to `centering`. Samples are
/// reduced in slice order.
pub fn estimate_gradients(samples: &[PerturbationSample], theta_l: &DMatrix<f64>, centering: Centering) -> Result<Gradients> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let p = theta_l.nrows();
    let count = samples.len() as f64;
    let mut mean_v = DVector::<f64>::zeros(p);
    let mut mean_vv = DMatrix::<f64>::zeros(p, p);
    let mut mean_rho = 0.0;
    for s in samples {
        if s.v.len() != p {
            return Err(Error::DimensionMismatch { expected: p, actual: s.v.len() });
        }
        let v = DVector::from_column_slice(&s.v);
        mean_v.axpy(s.reward / count, &v, 1.0);
        mean_vv.ger(s.reward / count, &v, &v, 1.0);
        mean_rho += s.reward / count;
    }
    let identity_weight = match centering {
        Centering::Literal => 1.0,
        Centering::RewardCentered => mean_rho,
    };
    for i in 0..p {
        mean_vv[(i, i)] -= identity_weight;
    }
    let lu = theta_l.transpose().lu();
    let g_x = lu.solve(&mean_v).ok_or(Error::Singular)?;
    let g_l = lu.solve(&mean_vv).ok_or(Error::Singular)?;
    if g_x.iter().chain(g_l.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(Gradients { g_x, g_l })
}

/// Gradient ascent step, then the singular values of `θ_L` are floored at `ε_L`.
pub fn apply_update(state: &mut TrainerState, grads: &Gradients, cfg: &OptimizerConfig) -> Result<()> {
    if let Some(index) = grads.g_x.iter().chain(grads.g_l.iter()).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    for (x, g) in state.theta_x.iter_mut().zip(grads.g_x.iter()) {
        *x += cfg.eta_x * g;
    }
    state.theta_l += &grads.g_l * cfg.eta_l;
    state.theta_l = floor_singular_values(&state.theta_l, cfg.eps_l);
    Ok(())
}

/// Returns `m` with every singular value below `eps` raised to `eps`.
pub fn floor_singular_values(m: &DMatrix<f64>, eps: f64) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    if svd.singular_values.iter().all(|&s| s >= eps) {
        return m.clone();
    }
    let mut svd = svd;
    for s in svd.singular_values.iter_mut() {
        if *s < eps {
            *s = eps;
        }
    }
    svd.recompose().expect("u and v were computed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample(v: Vec<f64>, reward: f64) -> PerturbationSample {
        PerturbationSample { v, reward, instance: "i".into(), seed: 0 }
    }

    #[test]
    fn single_sample_identity() {
        let v = vec![0.5, -1.0, 2.0];
        let g = estimate_gradients(&[sample(v.clone(), 2.0)], &DMatrix::identity(3, 3), Centering::Literal).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(g.g_x[i], 2.0 * v[i], epsilon = 1e-14);
            for j in 0..3 {
                let expect = 2.0 * v[i] * v[j] - if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(g.g_l[(i, j)], expect, epsilon = 1e-14);
            }
        }
        let c = estimate_gradients(&[sample(v.clone(), 2.0)], &DMatrix::identity(3, 3), Centering::RewardCentered)
            .unwrap();
        assert_abs_diff_eq!(c.g_l[(0, 0)], 2.0 * (0.25 - 1.0), epsilon = 1e-14);
    }

    #[test]
    fn non_identity_l_applies_inverse_transpose() {
        let l = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 0.5]);
        let v = vec![1.0, -3.0];
        let g = estimate_gradients(&[sample(v.clone(), 1.0)], &l, Centering::Literal).unwrap();
        let back = l.transpose() * &g.g_x;
        assert_abs_diff_eq!(back[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(back[1], -3.0, epsilon = 1e-14);
    }

    #[test]
    fn singular_l_is_an_error() {
        let l = DMatrix::zeros(2, 2);
        assert_eq!(estimate_gradients(&[sample(vec![1.0, 0.0], 1.0)], &l, Centering::Literal), Err(Error::Singular));
        assert!(estimate_gradients(&[], &DMatrix::identity(2, 2), Centering::Literal).is_err());
    }

    #[test]
    fn update_rules() {
        let cfg = OptimizerConfig::default();
        let mut s = TrainerState::from_mean(vec![1.0, 2.0], &cfg, 0.005);
        let before = s.clone();
        let zero = Gradients { g_x: DVector::zeros(2), g_l: DMatrix::zeros(2, 2) };
        apply_update(&mut s, &zero, &cfg).unwrap();
        assert_eq!(s, before);

        // Drive θ_L to exactly singular; the floor restores ε_L.
        let g = Gradients { g_x: DVector::zeros(2), g_l: DMatrix::from_row_slice(2, 2, &[-30.0, 0.0, 0.0, 0.0]) };
        apply_update(&mut s, &g, &cfg).unwrap();
        let sv = s.theta_l.clone().singular_values();
        assert_abs_diff_eq!(sv.min(), cfg.eps_l, epsilon = 1e-15);

        let frozen = OptimizerConfig { eta_x: 0.0, ..cfg };
        let g = Gradients { g_x: DVector::from_element(2, 1.0), g_l: DMatrix::identity(2, 2) };
        let mut t = before.clone();
        apply_update(&mut t, &g, &frozen).unwrap();
        assert_eq!(t.theta_x, before.theta_x);
        assert_ne!(t.theta_l, before.theta_l);

        let bad = Gradients { g_x: DVector::from_element(2, f64::NAN), g_l: DMatrix::zeros(2, 2) };
        assert!(apply_update(&mut t, &bad, &cfg).is_err());
    }

    #[test]
    fn init_is_seeded() {
        let arch = Architecture::new(4, 1, 1, crate::machine::Variant::Discrete).unwrap();
        let cfg = OptimizerConfig::default();
        let a = TrainerState::init(&arch, &cfg, 0.005, 3);
        assert_eq!(a, TrainerState::init(&arch, &cfg, 0.005, 3));
        assert_eq!(a.dim(), 6);
        assert_eq!(a.theta_l, DMatrix::identity(6, 6) * 0.3);
        assert_eq!(a.perturbed(&[0.0; 6]), a.theta_x);
    }
}
