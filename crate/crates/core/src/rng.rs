//! Seed fan-out and per-step noise streams.
//!
//! Every random quantity in the crate is a pure function of a master seed and
//! a short path of integer tags. [`derive_seed`] folds the path into a new
//! 64-bit seed with the SplitMix64 finalizer, so that e.g. the seed of
//! trajectory `r` of instance `b` in epoch `e` is
//! `derive_seed(master, &[TAG_TRAJECTORY, e, b, r])` no matter which worker
//! thread runs it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const TAG_INSTANCE: u64 = 1;
pub const TAG_PERTURBATION: u64 = 2;
pub const TAG_TRAJECTORY: u64 = 3;
pub const TAG_BATCH: u64 = 4;
pub const TAG_INIT: u64 = 5;
pub const TAG_BENCH: u64 = 6;
pub const TAG_STAGE: u64 = 7;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `path` into `seed`, producing a statistically independent child seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &tag| splitmix64(acc ^ splitmix64(tag)))
}

/// A ChaCha8 generator for the given seed path.
pub fn rng_for(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}

/// Source of the per-variable noise term injected into the update rule at
/// every step.
pub trait NoiseSource: Sync {
    /// Writes the draws for `step` into `out` (one per variable).
    fn fill(&self, step: usize, out: &mut [f64]);
}

/// Standard Gaussian noise, counter-based in `(seed, step, variable)`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianNoise {
    pub seed: u64,
}

impl GaussianNoise {
    pub fn new(seed: u64) -> Self {
        GaussianNoise { seed }
    }
}

impl NoiseSource for GaussianNoise {
    fn fill(&self, step: usize, out: &mut [f64]) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(step as u64);
        for slot in out.iter_mut() {
            *slot = StandardNormal.sample(&mut rng);
        }
    }
}

/// The same stream with every draw negated.
#[derive(Debug, Clone, Copy)]
pub struct Negated<S>(pub S);

impl<S: NoiseSource> NoiseSource for Negated<S> {
    fn fill(&self, step: usize, out: &mut [f64]) {
        self.0.fill(step, out);
        for v in out.iter_mut() {
            *v = -*v;
        }
    }
}

/// Noise that is identically zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroNoise;

impl NoiseSource for ZeroNoise {
    fn fill(&self, _step: usize, out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// A precomputed `steps x n` table of draws; steps past the end read as zero.
#[derive(Debug, Clone)]
pub struct TabulatedNoise {
    pub rows: Vec<Vec<f64>>,
}

impl NoiseSource for TabulatedNoise {
    fn fill(&self, step: usize, out: &mut [f64]) {
        match self.rows.get(step) {
            Some(row) => out.copy_from_slice(row),
            None => out.fill(0.0),
        }
    }
}
