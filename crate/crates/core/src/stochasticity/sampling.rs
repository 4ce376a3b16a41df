//! Drawing minibatch gradients from an arbitrary gradient source.

use rand::seq::index;
use rayon::prelude::*;

use super::enumerate::{for_each_minibatch_gradient, RevolvingDoor, ENUMERATION_CAP};
use super::gradient_set::{binomial, GradientSet, MinibatchSpec};
use super::report::StochasticityAccumulator;
use crate::error::{Error, Result};
use crate::linalg::{pairwise_vector_sum, DenseVector};
use crate::rng::RngStream;

/// Anything that can produce the minibatch negative gradient
/// `ĝ = −∇f_I(w)` for an index subset `I` at a fixed parameter.
pub trait GradientOracle: Sync {
    fn dim(&self) -> usize;
    fn n_examples(&self) -> usize;
    fn minibatch_gradient(&self, indices: &[usize]) -> Result<Vec<f64>>;
}

impl GradientOracle for GradientSet {
    fn dim(&self) -> usize {
        GradientSet::dim(self)
    }

    fn n_examples(&self) -> usize {
        self.n()
    }

    fn minibatch_gradient(&self, indices: &[usize]) -> Result<Vec<f64>> {
        let mut rows = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n() {
                return Err(Error::IndexOutOfRange { index: i, len: self.n() });
            }
            rows.push(self.row(i));
        }
        let m = indices.len() as f64;
        Ok(pairwise_vector_sum(&rows).into_iter().map(|x| x / m).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// `n_s` independent uniform subsets; a subset may recur across draws.
    Random,
    /// Every size-`m` subset once, in revolving-door order.
    Exhaustive,
}

/// Sorted uniform size-`m` subset of `0..n` for draw `k` of `stream`.
pub fn draw_subset(n: usize, m: usize, stream: RngStream, k: u64) -> Vec<usize> {
    let mut rng = stream.child(k).rng();
    let mut idx = index::sample(&mut rng, n, m).into_vec();
    idx.sort_unstable();
    idx
}

/// Visits `n_s` randomly drawn minibatch gradients in draw order.
///
/// Gradients are computed in parallel groups and handed to `visit` in index
/// order, so results are independent of the worker count. Memory is one
/// group of gradients.
pub fn for_each_sampled_gradient<O, F>(
    oracle: &O,
    n_s: usize,
    spec: MinibatchSpec,
    stream: RngStream,
    mut visit: F,
) -> Result<()>
where
    O: GradientOracle + ?Sized,
    F: FnMut(usize, &[f64]) -> Result<()>,
{
    let n = oracle.n_examples();
    spec.check(n)?;
    let group = rayon::current_num_threads().max(1) * 2;
    let mut start = 0;
    while start < n_s {
        let end = (start + group).min(n_s);
        let grads: Vec<Result<Vec<f64>>> = (start..end)
            .into_par_iter()
            .map(|k| oracle.minibatch_gradient(&draw_subset(n, spec.m(), stream, k as u64)))
            .collect();
        for (k, g) in (start..end).zip(grads) {
            visit(k, &g?)?;
        }
        start = end;
    }
    Ok(())
}

/// Materializes minibatch gradients. Intended for small `d`; use
/// [`accumulate_stochasticity`] when `n_s · d` does not fit in memory.
pub fn sample_minibatch_gradients<O>(
    oracle: &O,
    n_s: usize,
    spec: MinibatchSpec,
    stream: RngStream,
    mode: SamplingMode,
) -> Result<Vec<DenseVector>>
where
    O: GradientOracle + ?Sized,
{
    if n_s < 2 {
        return Err(Error::InvalidInput(format!("n_s must be at least 2, got {n_s}")));
    }
    let mut out = Vec::with_capacity(n_s);
    match mode {
        SamplingMode::Random => {
            for_each_sampled_gradient(oracle, n_s, spec, stream, |_, g| {
                out.push(DenseVector::new(g.to_vec())?);
                Ok(())
            })?;
        }
        SamplingMode::Exhaustive => {
            let n = oracle.n_examples();
            spec.check(n)?;
            let count = binomial(n, spec.m());
            if count > ENUMERATION_CAP {
                return Err(Error::TooManySubsets {
                    n,
                    m: spec.m(),
                    cap: ENUMERATION_CAP,
                });
            }
            if count != n_s as u64 {
                return Err(Error::InvalidInput(format!(
                    "exhaustive mode visits C(n, m) = {count} subsets, but n_s = {n_s}"
                )));
            }
            let mut door = RevolvingDoor::new(n, spec.m());
            while door.step() {
                out.push(DenseVector::new(oracle.minibatch_gradient(door.current())?)?);
            }
        }
    }
    Ok(out)
}

/// Streams `n_s` sampled minibatch gradients into a stochasticity accumulator.
pub fn accumulate_stochasticity<O>(
    oracle: &O,
    n_s: usize,
    spec: MinibatchSpec,
    stream: RngStream,
) -> Result<StochasticityAccumulator>
where
    O: GradientOracle + ?Sized,
{
    let mut acc = StochasticityAccumulator::new(oracle.dim());
    for_each_sampled_gradient(oracle, n_s, spec, stream, |_, g| acc.push(g))?;
    Ok(acc)
}

/// Exhaustive stochasticity accumulator over every subset of a gradient set.
pub fn accumulate_exhaustive(gs: &GradientSet, spec: MinibatchSpec) -> Result<StochasticityAccumulator> {
    let mut acc = StochasticityAccumulator::new(gs.dim());
    let mut err = None;
    for_each_minibatch_gradient(gs, spec, |g| {
        if err.is_none() {
            if let Err(e) = acc.push(g) {
                err = Some(e);
            }
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}
