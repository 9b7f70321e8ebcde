use serde::{Deserialize, Serialize};

use super::{IsingInstance, SpinConfig};
use crate::error::{Error, Result};

/// Largest `n` accepted by [`brute_force_ground`].
pub const EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundTruthMethod {
    Exhaustive,
}

/// The exact minimum energy and a configuration attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub energy: f64,
    pub config: SpinConfig,
    pub method: GroundTruthMethod,
}

/// Exact ground state by enumerating all `2^n` configurations.
///
/// Configurations are visited in lexicographic order (index 0 most
/// significant, `−1 < +1`) and only a strict improvement replaces the
/// incumbent, so ties resolve to the lexicographically smallest config.
/// Energies are updated incrementally, one spin flip at a time.
pub fn brute_force_ground(inst: &IsingInstance) -> Result<GroundTruth> {
    let n = inst.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge { n, limit: EXHAUSTIVE_LIMIT });
    }
    let mut spins = vec![-1i8; n];
    // local[i] = Σ_j J_ij s_j
    let mut local: Vec<f64> = (0..n).map(|i| -inst.row(i).iter().sum::<f64>()).collect();
    let mut energy = inst.energy_unchecked(&spins);
    let mut best_energy = energy;
    let mut best = spins.clone();

    let flip = |k: usize, spins: &mut [i8], local: &mut [f64], energy: &mut f64| {
        let s = f64::from(spins[k]);
        *energy += -4.0 * s * local[k] + 2.0 * inst.linear()[k] * s;
        for (j, slot) in local.iter_mut().enumerate() {
            *slot -= 2.0 * s * inst.coupling(j, k);
        }
        spins[k] = -spins[k];
    };

    let total: u64 = 1u64 << n;
    for counter in 1..total {
        // Incrementing the counter clears the trailing ones and sets the next
        // zero; bit b of the counter is spin n - 1 - b.
        let trailing = counter.trailing_zeros() as usize;
        for b in 0..trailing {
            flip(n - 1 - b, &mut spins, &mut local, &mut energy);
        }
        flip(n - 1 - trailing, &mut spins, &mut local, &mut energy);
        let tol = 1e-9 * best_energy.abs().max(1.0);
        if energy < best_energy - tol {
            best_energy = energy;
            best.copy_from_slice(&spins);
        }
    }
    let config = SpinConfig::new(best).expect("enumeration only produces ±1");
    Ok(GroundTruth {
        energy: inst.energy_unchecked(config.as_slice()),
        config,
        method: GroundTruthMethod::Exhaustive,
    })
}
