use std::f64::consts::PI;

use super::Basis;
use crate::error::{Error, Result};

/// The `m`-th temporal basis function at normalized time `tau ∈ [0, 1]`.
///
/// Fourier: `cos(m/2 · π τ)` for even `m`, `sin((m+1)/2 · π τ)` for odd `m`.
/// Legendre and Chebyshev: the degree-`m` polynomial evaluated at `2τ − 1`.
pub fn basis_value(basis: Basis, m: usize, tau: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!("tau = {tau} outside [0, 1]")));
    }
    Ok(eval(basis, m, tau))
}

pub(crate) fn eval(basis: Basis, m: usize, tau: f64) -> f64 {
    match basis {
        Basis::Fourier => {
            if m % 2 == 0 {
                (m as f64 / 2.0 * PI * tau).cos()
            } else {
                ((m + 1) as f64 / 2.0 * PI * tau).sin()
            }
        }
        Basis::Legendre => {
            let x = 2.0 * tau - 1.0;
            // (k+1) P_{k+1} = (2k+1) x P_k − k P_{k−1}
            let (mut prev, mut cur) = (1.0, x);
            if m == 0 {
                return prev;
            }
            for k in 1..m {
                let k = k as f64;
                let next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
                prev = cur;
                cur = next;
            }
            cur
        }
        Basis::Chebyshev => {
            let x = 2.0 * tau - 1.0;
            let (mut prev, mut cur) = (1.0, x);
            if m == 0 {
                return prev;
            }
            for _ in 1..m {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// All `m_count` basis values at `tau`.
pub(crate) fn values(basis: Basis, m_count: usize, tau: f64) -> Vec<f64> {
    (0..m_count).map(|m| eval(basis, m, tau)).collect()
}
