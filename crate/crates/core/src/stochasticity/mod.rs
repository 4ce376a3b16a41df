//! Minibatch gradient norm stochasticity: exact enumerated moments with their
//! upper bounds, and sampled GS/GNS/κ̂ metrics from any gradient source.

pub mod enumerate;
pub mod gradient_set;
pub mod report;
pub mod sampling;

pub use enumerate::{
    enumerate_minibatch_moments, lemma_a1_second_moment, theorem1_bounds, ExactMoments, RevolvingDoor,
    Theorem1Bounds, ENUMERATION_CAP,
};
pub use gradient_set::{binomial, full_gradient, gamma_max_inner, GradientSet, MinibatchSpec};
pub use report::{stochasticity_report, ReportFlags, StochasticityAccumulator, StochasticityReport};
pub use sampling::{
    accumulate_exhaustive, accumulate_stochasticity, draw_subset, for_each_sampled_gradient,
    sample_minibatch_gradients, GradientOracle, SamplingMode,
};
