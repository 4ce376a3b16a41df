//! Seeded fixtures shared by the benchmarks.

use gradcompass::nn::{Batch, FnnModel};
use gradcompass::stochasticity::GradientSet;
use gradcompass::RngStream;
use rand::Rng;
use rand_distr::StandardNormal;

/// `n` Gaussian gradients in `d` dimensions around a common offset.
pub fn gradient_set(n: usize, d: usize, seed: u64) -> GradientSet {
    let mut rng = RngStream::new(seed, 0).rng();
    let rows = (0..n)
        .map(|_| (0..d).map(|j| if j == 0 { 1.0 } else { 0.0 } + rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    GradientSet::from_rows(rows).expect("finite rows")
}

/// A batch of `m` uniform-pixel images sized for `model`.
pub fn random_batch(model_input: usize, m: usize, seed: u64) -> Batch {
    let mut rng = RngStream::new(seed, 1).rng();
    Batch {
        x: (0..m * model_input).map(|_| rng.random::<f64>()).collect(),
        labels: (0..m).map(|i| (i % 10) as u8).collect(),
    }
}

/// The 784-800-10 network at a seeded Xavier initialization.
pub fn mnist_model(seed: u64) -> FnnModel {
    FnnModel::mnist(RngStream::new(seed, 2))
}
