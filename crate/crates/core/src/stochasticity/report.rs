//! Sampled stochasticity metrics: GS, GNS and κ̂ of minibatch gradients.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::directional::{h, StreamingResultant};
use crate::error::{Error, Result};
use crate::linalg::{check_dims, norm, norm_sq, pairwise_sum, pairwise_vector_sum, ZERO_NORM_THRESHOLD};
use crate::stats;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFlags {
    /// Trace of the sample covariance is zero; `gs` is undefined.
    pub zero_variance: bool,
    /// Sample std of the norms is zero; `gns` is undefined.
    pub zero_norm_variance: bool,
    /// Some gradients had no direction and were left out of κ̂.
    pub degenerate_resultant: bool,
}

impl ReportFlags {
    pub fn any(&self) -> bool {
        self.zero_variance || self.zero_norm_variance || self.degenerate_resultant
    }
}

impl fmt::Display for ReportFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.zero_variance, "zero_variance"),
            (self.zero_norm_variance, "zero_norm_variance"),
            (self.degenerate_resultant, "degenerate_resultant"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        f.write_str(&names.join("|"))
    }
}

impl std::str::FromStr for ReportFlags {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut flags = ReportFlags::default();
        for part in s.split('|').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "zero_variance" => flags.zero_variance = true,
                "zero_norm_variance" => flags.zero_norm_variance = true,
                "degenerate_resultant" => flags.degenerate_resultant = true,
                other => return Err(Error::InvalidInput(format!("unknown flag {other:?}"))),
            }
        }
        Ok(flags)
    }
}

/// Metrics of `n_s` sampled minibatch gradients at one step.
///
/// `gs = ‖mean‖ / √tr(Cov)` and `gns = mean‖ĝ‖ / std‖ĝ‖` are stored as raw
/// ratios; both grow as the gradients become less noisy. Undefined values
/// are NaN with the matching flag set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StochasticityReport {
    pub step: u64,
    pub n_s: usize,
    pub gs: f64,
    pub gns: f64,
    pub kappa_hat: f64,
    pub flags: ReportFlags,
}

#[derive(Serialize)]
struct CsvRow {
    step: u64,
    n_s: usize,
    gs: f64,
    gns: f64,
    kappa_hat: f64,
    flags: String,
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    step: u64,
    n_s: usize,
    gs: f64,
    gns: f64,
    kappa_hat: f64,
    flags: &'a str,
}

impl StochasticityReport {
    pub const CSV_HEADER: [&'static str; 6] = ["step", "n_s", "gs", "gns", "kappa_hat", "flags"];

    pub fn write_csv<W: Write>(reports: &[StochasticityReport], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if reports.is_empty() {
            w.write_record(Self::CSV_HEADER)?;
        }
        for r in reports {
            w.serialize(CsvRow {
                step: r.step,
                n_s: r.n_s,
                gs: r.gs,
                gns: r.gns,
                kappa_hat: r.kappa_hat,
                flags: r.flags.to_string(),
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let flags = self.flags.to_string();
        Ok(serde_json::to_string(&JsonRecord {
            step: self.step,
            n_s: self.n_s,
            gs: self.gs,
            gns: self.gns,
            kappa_hat: self.kappa_hat,
            flags: &flags,
        })?)
    }
}

fn ratio_or_flag(num: f64, den_sq: f64, scale_sq: f64) -> (f64, bool) {
    if !(den_sq > f64::EPSILON * f64::EPSILON * scale_sq) || den_sq <= 0.0 {
        (f64::NAN, true)
    } else {
        (num / den_sq.sqrt(), false)
    }
}

/// Streaming accumulator for [`StochasticityReport`] in `O(d)` memory.
///
/// The vector mean and the covariance trace use Welford's update; partial
/// accumulators combine with the parallel (Chan) merge.
#[derive(Debug, Clone)]
pub struct StochasticityAccumulator {
    count: usize,
    mean: Vec<f64>,
    trace_m2: f64,
    norm_mean: f64,
    norm_m2: f64,
    resultant: StreamingResultant,
    skipped_directions: usize,
}

impl StochasticityAccumulator {
    pub fn new(d: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; d],
            trace_m2: 0.0,
            norm_mean: 0.0,
            norm_m2: 0.0,
            resultant: StreamingResultant::new(d),
            skipped_directions: 0,
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn push(&mut self, g: &[f64]) -> Result<()> {
        check_dims(self.dim(), g.len())?;
        self.count += 1;
        let k = self.count as f64;
        let mut m2_inc = 0.0;
        for (m, &x) in self.mean.iter_mut().zip(g) {
            let delta = x - *m;
            *m += delta / k;
            m2_inc += delta * (x - *m);
        }
        self.trace_m2 += m2_inc;
        let nv = norm(g);
        let delta = nv - self.norm_mean;
        self.norm_mean += delta / k;
        self.norm_m2 += delta * (nv - self.norm_mean);
        if !self.resultant.push_normalized(g)? {
            self.skipped_directions += 1;
        }
        Ok(())
    }

    /// Folds `other` in as if its samples had been pushed after ours.
    pub fn merge(&mut self, other: &StochasticityAccumulator) -> Result<()> {
        check_dims(self.dim(), other.dim())?;
        if other.count == 0 {
            return Ok(());
        }
        if self.count == 0 {
            *self = other.clone();
            return Ok(());
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let mut delta_sq = 0.0;
        for (m, &mb) in self.mean.iter_mut().zip(&other.mean) {
            let delta = mb - *m;
            delta_sq += delta * delta;
            *m += delta * nb / n;
        }
        self.trace_m2 += other.trace_m2 + delta_sq * na * nb / n;
        let dn = other.norm_mean - self.norm_mean;
        self.norm_mean += dn * nb / n;
        self.norm_m2 += other.norm_m2 + dn * dn * na * nb / n;
        self.resultant.merge(&other.resultant);
        self.skipped_directions += other.skipped_directions;
        self.count += other.count;
        Ok(())
    }

    pub fn mean_norm(&self) -> f64 {
        self.norm_mean
    }

    pub fn resultant(&self) -> &StreamingResultant {
        &self.resultant
    }

    pub fn report(&self, step: u64) -> Result<StochasticityReport> {
        if self.count < 2 {
            return Err(Error::EmptyInput("stochasticity needs at least 2 gradients"));
        }
        let dof = (self.count - 1) as f64;
        let mean_sq = norm_sq(&self.mean);
        let (gs, zero_variance) = ratio_or_flag(mean_sq.sqrt(), self.trace_m2 / dof, mean_sq);
        let (gns, zero_norm_variance) =
            ratio_or_flag(self.norm_mean, self.norm_m2 / dof, self.norm_mean * self.norm_mean);
        let kept = self.resultant.count();
        let kappa_hat = if kept == 0 {
            0.0
        } else {
            h(norm(&self.resultant.sum()), kept, self.dim())?
        };
        Ok(StochasticityReport {
            step,
            n_s: self.count,
            gs,
            gns,
            kappa_hat,
            flags: ReportFlags {
                zero_variance,
                zero_norm_variance,
                degenerate_resultant: self.skipped_directions > 0,
            },
        })
    }
}

/// Two-pass report over an in-memory list of minibatch gradients.
pub fn stochasticity_report<V: AsRef<[f64]>>(minibatch_grads: &[V], step: u64) -> Result<StochasticityReport> {
    if minibatch_grads.len() < 2 {
        return Err(Error::EmptyInput("stochasticity needs at least 2 gradients"));
    }
    let d = minibatch_grads[0].as_ref().len();
    for g in minibatch_grads {
        check_dims(d, g.as_ref().len())?;
    }
    let n_s = minibatch_grads.len();
    let dof = (n_s - 1) as f64;
    let sum = pairwise_vector_sum(minibatch_grads);
    let mean: Vec<f64> = sum.iter().map(|s| s / n_s as f64).collect();
    let dev: Vec<f64> = minibatch_grads
        .iter()
        .map(|g| {
            let g = g.as_ref();
            let mut acc = 0.0;
            for (x, m) in g.iter().zip(&mean) {
                acc += (x - m) * (x - m);
            }
            acc
        })
        .collect();
    let trace = pairwise_sum(&dev) / dof;
    let mean_sq = norm_sq(&mean);
    let (gs, zero_variance) = ratio_or_flag(mean_sq.sqrt(), trace, mean_sq);

    let norms: Vec<f64> = minibatch_grads.iter().map(|g| norm(g.as_ref())).collect();
    let norm_mean = stats::mean(&norms);
    let norm_var = {
        let sq: Vec<f64> = norms.iter().map(|x| (x - norm_mean) * (x - norm_mean)).collect();
        pairwise_sum(&sq) / dof
    };
    let (gns, zero_norm_variance) = ratio_or_flag(norm_mean, norm_var, norm_mean * norm_mean);

    let units: Vec<Vec<f64>> = minibatch_grads
        .iter()
        .zip(&norms)
        .filter(|(_, &n)| n > ZERO_NORM_THRESHOLD)
        .map(|(g, &n)| g.as_ref().iter().map(|x| x / n).collect())
        .collect();
    let kappa_hat = if units.is_empty() {
        0.0
    } else {
        h(norm(&pairwise_vector_sum(&units)), units.len(), d)?
    };
    Ok(StochasticityReport {
        step,
        n_s,
        gs,
        gns,
        kappa_hat,
        flags: ReportFlags {
            zero_variance,
            zero_norm_variance,
            degenerate_resultant: units.len() < n_s,
        },
    })
}
