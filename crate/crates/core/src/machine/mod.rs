//! The learned Ising machine.
//!
//! A node-wise update rule maps the last `T_c` local fields of each variable
//! (plus one Gaussian draw) to its next state. The rule is a small odd MLP
//! whose weights are modulated over normalized time by a temporal basis.

mod arch;
mod basis;
mod model;
mod params;
mod trajectory;
mod update;

pub use arch::{param_count, Architecture, Basis, Variant};
pub use basis::basis_value;
pub use model::{
    weight_columns, write_trace_csv, write_weight_snapshot_csv, ModelFile, TrainingMeta, MODEL_FORMAT_VERSION,
};
pub use params::{ParameterTensor, Weights};
pub use trajectory::{run_trajectory, run_trajectory_with, TrajectoryOptions, TrajectoryResult};
pub use update::{f_nl, sign, update};

pub(crate) use basis::values as basis_values;
pub(crate) use trajectory::Recorder;

use crate::error::Result;
use crate::instance::IsingInstance;
use crate::rng::GaussianNoise;

/// Anything that turns an instance and a seed into a best-over-trajectory readout.
pub trait IsingMachine: Sync {
    /// Short label used in result tables.
    fn name(&self) -> String;

    fn run(&self, inst: &IsingInstance, t_total: usize, seed: u64) -> Result<TrajectoryResult>;
}

/// A trained update rule packaged as an [`IsingMachine`].
#[derive(Debug, Clone)]
pub struct Npim {
    pub params: ParameterTensor,
    pub options: TrajectoryOptions,
}

impl Npim {
    pub fn new(params: ParameterTensor) -> Self {
        Npim { params, options: TrajectoryOptions::default() }
    }
}

impl IsingMachine for Npim {
    fn name(&self) -> String {
        match self.params.arch().variant {
            Variant::Continuous => "cnpim".into(),
            Variant::Discrete => "dnpim".into(),
        }
    }

    fn run(&self, inst: &IsingInstance, t_total: usize, seed: u64) -> Result<TrajectoryResult> {
        let mut r = run_trajectory_with(inst, &self.params, t_total, &GaussianNoise::new(seed), self.options)?;
        r.seed = Some(seed);
        Ok(r)
    }
}
