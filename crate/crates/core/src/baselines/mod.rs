//! Classical dynamical Ising machines used as baselines.
//!
//! Both machines use the same local field `h = J x − l/2` as the learned
//! machine, so a descent step on the energy is a step along `−h`.

mod aim;
mod cac;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use aim::{
    aim_as_npim, aim_drive, aim_explicit_kernel, aim_explicit_run, aim_initial_state, aim_run, aim_run_from,
    AimConfig, AimKernel, AimRun,
};
pub use cac::{cac_run, cac_run_traced, CacConfig};

/// Tuned defaults shipped with the crate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineDefaults {
    /// Description of the tuning run that produced the values.
    pub tuned_on: String,
    pub cac: CacConfig,
    pub aim: AimConfig,
}

const DEFAULTS_JSON: &str = include_str!("../../data/baseline_defaults.json");

pub fn baseline_defaults() -> &'static BaselineDefaults {
    static CELL: OnceLock<BaselineDefaults> = OnceLock::new();
    CELL.get_or_init(|| serde_json::from_str(DEFAULTS_JSON).expect("bundled baseline defaults parse"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_defaults_are_valid() {
        let d = baseline_defaults();
        d.cac.validate().unwrap();
        d.aim.validate().unwrap();
    }
}
