pub mod error;
pub mod baselines;
pub mod benchmark;
pub mod instance;
pub mod machine;
pub mod rng;
pub mod training;

pub use error::{Error, Result};
