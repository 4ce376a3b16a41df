//! Resultant statistics of direction samples and the κ̂ Monte-Carlo driver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kappa::{kappa_hat_from_rbar, RBAR_CLAMP};
use super::sphere::fill_uniform_sphere;
use super::vmf::VmfSampler;
use crate::error::{Error, Result};
use crate::linalg::{
    check_dims, norm, pairwise_vector_sum, CompensatedVectorSum, UnitVector, ZERO_NORM_THRESHOLD,
};
use crate::rng::{RngStream, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResultantSummary {
    pub n: usize,
    pub d: usize,
    pub resultant_norm: f64,
    pub r_bar: f64,
    pub kappa_hat: f64,
    /// Set when `r̄` hit the clamp and κ̂ is the largest finite value.
    pub clamped: bool,
}

impl ResultantSummary {
    pub fn from_norm(resultant_norm: f64, n: usize, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput("no samples in resultant"));
        }
        let r_bar = resultant_norm / n as f64;
        let kappa_hat = kappa_hat_from_rbar(r_bar, d)?;
        Ok(Self {
            n,
            d,
            resultant_norm,
            r_bar,
            kappa_hat,
            clamped: r_bar > RBAR_CLAMP,
        })
    }
}

fn common_dim(samples: &[UnitVector]) -> Result<usize> {
    let first = samples
        .first()
        .ok_or(Error::EmptyInput("no direction samples"))?
        .dim();
    for s in samples {
        check_dims(first, s.dim())?;
    }
    Ok(first)
}

pub fn resultant_summary(samples: &[UnitVector]) -> Result<ResultantSummary> {
    let d = common_dim(samples)?;
    let sum = pairwise_vector_sum(samples);
    ResultantSummary::from_norm(norm(&sum), samples.len(), d)
}

/// `Σx / ‖Σx‖`.
pub fn estimate_mean_direction(samples: &[UnitVector]) -> Result<UnitVector> {
    common_dim(samples)?;
    let sum = pairwise_vector_sum(samples);
    let n = norm(&sum);
    if !(n > ZERO_NORM_THRESHOLD) {
        return Err(Error::DegenerateSum { norm: n });
    }
    Ok(UnitVector::from_normalized(sum.iter().map(|x| x / n).collect()))
}

/// Resultant of a stream of directions held in `O(d)` memory.
#[derive(Debug, Clone)]
pub struct StreamingResultant {
    acc: CompensatedVectorSum,
}

impl StreamingResultant {
    pub fn new(d: usize) -> Self {
        Self {
            acc: CompensatedVectorSum::new(d),
        }
    }

    pub fn count(&self) -> usize {
        self.acc.count()
    }

    pub fn push_unit(&mut self, x: &[f64]) -> Result<()> {
        check_dims(self.acc.dim(), x.len())?;
        self.acc.add(x);
        Ok(())
    }

    /// Normalizes `v` on the fly. Returns `false` and skips it when degenerate.
    pub fn push_normalized(&mut self, v: &[f64]) -> Result<bool> {
        check_dims(self.acc.dim(), v.len())?;
        let n = norm(v);
        if !(n > ZERO_NORM_THRESHOLD) || !n.is_finite() {
            return Ok(false);
        }
        self.acc.add_scaled(1.0 / n, v);
        Ok(true)
    }

    pub fn merge(&mut self, other: &StreamingResultant) {
        self.acc.merge(&other.acc);
    }

    pub fn sum(&self) -> Vec<f64> {
        self.acc.value()
    }

    pub fn summary(&self) -> Result<ResultantSummary> {
        ResultantSummary::from_norm(self.acc.norm(), self.acc.count(), self.acc.dim())
    }
}

const CHUNK: usize = 32;

/// Resultant of `n` directions drawn by `draw`, sample `i` using the child
/// stream `i` of `stream`. Chunks run in parallel and are merged in index
/// order, so the result does not depend on the thread count.
pub fn streaming_resultant<F>(d: usize, n: usize, stream: RngStream, draw: F) -> Result<StreamingResultant>
where
    F: Fn(&mut [f64], &mut StreamRng) + Sync,
{
    if d == 0 || n == 0 {
        return Err(Error::EmptyInput("dimension and sample count must be positive"));
    }
    let chunks = n.div_ceil(CHUNK);
    let group = rayon::current_num_threads().max(1);
    let mut total = StreamingResultant::new(d);
    let mut start = 0;
    while start < chunks {
        let end = (start + group).min(chunks);
        let partials: Vec<StreamingResultant> = (start..end)
            .into_par_iter()
            .map(|c| {
                let mut part = StreamingResultant::new(d);
                let mut buf = vec![0.0; d];
                let mut plain = vec![0.0; d];
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(n);
                for i in lo..hi {
                    let mut rng = stream.child(i as u64).rng();
                    draw(&mut buf, &mut rng);
                    for (p, b) in plain.iter_mut().zip(&buf) {
                        *p += b;
                    }
                }
                part.acc.add(&plain);
                part
            })
            .collect();
        for p in &partials {
            total.merge(p);
        }
        start = end;
    }
    // Chunks were folded in as single terms; report the sample count.
    total.acc = total.acc.with_count(n);
    Ok(total)
}

/// κ̂ of `n` independent uniform directions in `d` dimensions (true κ = 0).
pub fn simulate_uniform_kappa_hat(d: usize, n: usize, stream: RngStream) -> Result<ResultantSummary> {
    streaming_resultant(d, n, stream, |buf, rng| {
        fill_uniform_sphere(buf, rng);
    })?
    .summary()
}

/// Resultant of `n` draws from a vMF sampler.
pub fn simulate_vmf_resultant(
    sampler: &VmfSampler,
    n: usize,
    stream: RngStream,
) -> Result<StreamingResultant> {
    let d = sampler.model().dim();
    streaming_resultant(d, n, stream, |buf, rng| {
        let x = sampler.sample_with(rng);
        buf.copy_from_slice(x.as_slice());
    })
}
