use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Output nonlinearity of the update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `x = tanh(a)`, soft spins in `(−1, 1)`.
    Continuous,
    /// `x = sign(a)` with `sign(0) = +1`.
    Discrete,
}

/// Temporal basis used to modulate the weights over normalized time `t / T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    #[default]
    Fourier,
    Legendre,
    Chebyshev,
}

/// Shape of the update rule.
///
/// `d` is the hidden width. `d = 0` selects the single-layer rule
/// `a = W⁰η + Σ_s W²_s h(t − T_c + s)` without hidden nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Architecture {
    pub t_c: usize,
    pub d: usize,
    pub m: usize,
    pub variant: Variant,
    #[serde(default)]
    pub basis: Basis,
    #[serde(default)]
    pub noise_modulated: bool,
}

impl Architecture {
    pub fn new(t_c: usize, d: usize, m: usize, variant: Variant) -> Result<Self> {
        let arch = Architecture { t_c, d, m, variant, basis: Basis::Fourier, noise_modulated: false };
        arch.validate()?;
        Ok(arch)
    }

    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    pub fn with_noise_modulated(mut self, on: bool) -> Self {
        self.noise_modulated = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_c == 0 {
            return Err(Error::InvalidParameter("history length t_c must be >= 1".into()));
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("temporal mode count m must be >= 1".into()));
        }
        Ok(())
    }

    pub fn is_single_layer(&self) -> bool {
        self.d == 0
    }

    /// Rows of the weight-mode matrix: the flattened `(W⁰, W¹, W²)`.
    pub fn weight_rows(&self) -> usize {
        if self.is_single_layer() {
            1 + self.t_c
        } else {
            1 + self.d + self.d * self.t_c
        }
    }

    /// Trainable parameter count.
    pub fn param_count(&self) -> usize {
        param_count(self)
    }
}

/// `(D + D·T_c)·M + 1`, or `(1 + D + D·T_c)·M` when the noise weight is also
/// time-modulated. The single-layer rule has `T_c·M + 1` (resp. `(1 + T_c)·M`).
pub fn param_count(arch: &Architecture) -> usize {
    let rows = arch.weight_rows();
    if arch.noise_modulated {
        rows * arch.m
    } else {
        (rows - 1) * arch.m + 1
    }
}
