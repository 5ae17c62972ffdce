//! Fixtures shared by the criterion benches.

use mfdepth::simulate::{generate, ModelId, ModelSpec};
use mfdepth::Dataset;

/// Dense Model I sample.
pub fn dataset(n: usize, t: usize, seed: u64) -> Dataset {
    generate(&ModelSpec { model: ModelId::I, n, t, jitter: 0.0 }, seed).expect("valid model spec")
}

/// Bivariate cloud of `n` points: the values of `n` Model I curves at one time.
pub fn cloud(n: usize, seed: u64) -> Vec<[f64; 2]> {
    dataset(n, 1, seed).curves.iter().map(|c| [c.value(0, 0), c.value(0, 1)]).collect()
}
