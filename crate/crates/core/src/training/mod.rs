//! Training the update rule.
//!
//! The trainer keeps a Gaussian search distribution `θ = θ_x + θ_L v` over
//! the trainable vector, scores perturbed machines by a reward relative to
//! the best energy seen so far for each instance, and moves both the mean
//! and the exploration matrix along zeroth-order gradient estimates.

mod config;
mod das;
mod epoch;
mod evaluate;
mod ledger;
mod pipeline;
mod reinforce;
mod reward;

pub use config::{Budget, MachineKind, Stage, TrainConfig, TrainSettings, TrainerKind, CONFIG_SCHEMA_VERSION};
pub use das::{
    apply_update, estimate_gradients, floor_singular_values, Centering, Gradients, OptimizerConfig,
    PerturbationSample, TrainerState,
};
pub use epoch::{train, train_epoch, write_epoch_csv, EpochReport, TrainOutcome};
pub use evaluate::{evaluate, Evaluation};
pub use ledger::EnergyLedger;
pub use pipeline::{exact_ledger, run_pipeline, run_stage, StageOutcome};
pub use reinforce::{policy_rollout, reinforce_epoch, reinforce_gradient, PolicyRollout};
pub use reward::{reaches, reward_objective, reward_success, tau_update, RewardConfig, RewardKind};
