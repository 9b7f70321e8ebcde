use serde::{Deserialize, Serialize};

use super::{basis, Architecture};
use crate::error::{Error, Result};

/// The weight-mode matrix `Θ` (rows: flattened `W⁰, W¹, W²`; columns: modes).
///
/// Row 0 is the noise weight `W⁰`, rows `1..=D` are `W¹_k`, and the
/// remaining `D·T_c` rows are `W²_{k,s}` in `k`-major order. For the
/// single-layer rule the `W¹` block is absent and `W²` is one row of `T_c`.
/// Unless the architecture is noise-modulated only mode 0 of `W⁰` is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterTensor {
    arch: Architecture,
    theta: Vec<f64>,
}

/// Weights of the update rule at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub w0: f64,
    /// Length `D` (empty for the single-layer rule).
    pub w1: Vec<f64>,
    /// `D x T_c` row-major (`1 x T_c` for the single-layer rule).
    pub w2: Vec<f64>,
}

impl Weights {
    pub fn zeros(arch: &Architecture) -> Self {
        let hidden = arch.d.max(1);
        Weights { w0: 0.0, w1: vec![0.0; arch.d], w2: vec![0.0; hidden * arch.t_c] }
    }

    /// The flattened `θ(t)` in row order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(1 + self.w1.len() + self.w2.len());
        out.push(self.w0);
        out.extend_from_slice(&self.w1);
        out.extend_from_slice(&self.w2);
        out
    }
}

impl ParameterTensor {
    pub fn zeros(arch: Architecture) -> Self {
        ParameterTensor { theta: vec![0.0; arch.weight_rows() * arch.m], arch }
    }

    /// Builds from a row-major `weight_rows x m` matrix.
    pub fn from_matrix(arch: Architecture, theta: Vec<f64>) -> Result<Self> {
        arch.validate()?;
        let expected = arch.weight_rows() * arch.m;
        if theta.len() != expected {
            return Err(Error::DimensionMismatch { expected, actual: theta.len() });
        }
        if let Some(index) = theta.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if !arch.noise_modulated && theta[1..arch.m].iter().any(|&v| v != 0.0) {
            return Err(Error::InvalidParameter(
                "noise weight has nonzero higher modes but noise_modulated is false".into(),
            ));
        }
        Ok(ParameterTensor { arch, theta })
    }

    /// Builds from the trainable vector of length `param_count(arch)`.
    pub fn from_flat(arch: Architecture, flat: &[f64]) -> Result<Self> {
        arch.validate()?;
        let expected = arch.param_count();
        if flat.len() != expected {
            return Err(Error::DimensionMismatch { expected, actual: flat.len() });
        }
        if let Some(index) = flat.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let mut theta = vec![0.0; arch.weight_rows() * arch.m];
        if arch.noise_modulated {
            theta.copy_from_slice(flat);
        } else {
            theta[0] = flat[0];
            theta[arch.m..].copy_from_slice(&flat[1..]);
        }
        Ok(ParameterTensor { arch, theta })
    }

    pub fn to_flat(&self) -> Vec<f64> {
        if self.arch.noise_modulated {
            self.theta.clone()
        } else {
            let mut flat = Vec::with_capacity(self.arch.param_count());
            flat.push(self.theta[0]);
            flat.extend_from_slice(&self.theta[self.arch.m..]);
            flat
        }
    }

    /// Position of `Θ[row, mode]` in the trainable vector, if it is trainable.
    pub fn flat_index(arch: &Architecture, row: usize, mode: usize) -> Option<usize> {
        if row >= arch.weight_rows() || mode >= arch.m {
            return None;
        }
        if arch.noise_modulated {
            Some(row * arch.m + mode)
        } else if row == 0 {
            (mode == 0).then_some(0)
        } else {
            Some(1 + (row - 1) * arch.m + mode)
        }
    }

    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    /// Row-major `weight_rows x m` matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.theta
    }

    pub fn get(&self, row: usize, mode: usize) -> f64 {
        self.theta[row * self.arch.m + mode]
    }

    /// `θ(t) = Σ_m Θ[:, m] f_m(t / T)`, unflattened.
    pub fn weights_at(&self, t: usize, t_total: usize) -> Result<Weights> {
        if t >= t_total {
            return Err(Error::InvalidParameter(format!("step {t} outside 0..{t_total}")));
        }
        let mut w = Weights::zeros(&self.arch);
        let f = basis::values(self.arch.basis, self.arch.m, t as f64 / t_total as f64);
        self.weights_into(&f, &mut w);
        Ok(w)
    }

    pub(crate) fn weights_into(&self, basis_vals: &[f64], out: &mut Weights) {
        let m = self.arch.m;
        let row_value = |row: usize| -> f64 {
            let modes = &self.theta[row * m..(row + 1) * m];
            modes.iter().zip(basis_vals).map(|(a, b)| a * b).sum()
        };
        out.w0 = if self.arch.noise_modulated { row_value(0) } else { self.theta[0] };
        let d = self.arch.d;
        for k in 0..d {
            out.w1[k] = row_value(1 + k);
        }
        let offset = 1 + d;
        for (idx, slot) in out.w2.iter_mut().enumerate() {
            *slot = row_value(offset + idx);
        }
    }
}
