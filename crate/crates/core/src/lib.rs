//! Directional statistics of minibatch gradients.
//!
//! * [`directional`]: vMF density, sampling and the κ̂ estimator, angle laws.
//! * [`stochasticity`]: exact minibatch norm moments and sampled GS/GNS/κ̂.
//! * [`geometry`]: resultant-decrease checks and quadratic SGD simulations.
//! * [`nn`]: MNIST loader and an instrumented 784-800-10 network.

// `!(x > t)` is used deliberately so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod directional;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod nn;
pub mod rng;
pub mod stats;
pub mod stochasticity;

pub use error::{Error, Result};
pub use linalg::{normalize, DenseVector, UnitVector};
pub use rng::RngStream;
