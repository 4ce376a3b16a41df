//! Epoch-wise SGD on a quadratic ensemble, tracking κ̂ at epoch boundaries.

use std::io::Write;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::anchors::MIN_ANCHOR_DISTANCE;
use super::quadratic::{direction_discrepancy, quadratic_minibatch_gradient, QuadraticEnsemble};
use crate::directional::h;
use crate::error::{Error, Result};
use crate::linalg::{check_dims, dist_sq, norm, pairwise_vector_sum, ZERO_NORM_THRESHOLD};
use crate::rng::RngStream;

/// State of the run at the start of one epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub w: Vec<f64>,
    /// κ̂ of the normalized minibatch gradients `ĝ_i(w)`.
    pub kappa_grad: f64,
    /// κ̂ of the normalized anchor directions `p_i − w`.
    pub kappa_anchor: f64,
    pub resultant_grad: f64,
    pub resultant_anchor: f64,
    /// Mean `‖ĝ_i(w)‖`, the common gradient scale.
    pub mean_grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdTrace {
    pub lr: f64,
    pub epochs_requested: usize,
    pub records: Vec<EpochRecord>,
    /// The iterate entered the exclusion ball of an anchor.
    pub stopped_early: bool,
    /// Gradient evaluations whose direction was compared with its anchor's.
    pub alignment_checks: usize,
    pub alignment_violations: usize,
    /// Largest observed discrepancy divided by its bound (0 when all bounds are 0).
    pub max_alignment_ratio: f64,
}

#[derive(Serialize)]
struct CsvRow {
    epoch: usize,
    kappa_grad: f64,
    kappa_anchor: f64,
    resultant_grad: f64,
    resultant_anchor: f64,
    mean_grad_norm: f64,
}

impl SgdTrace {
    pub fn kappa_anchor(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.kappa_anchor).collect()
    }

    pub fn kappa_grad(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.kappa_grad).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.records.is_empty() {
            w.write_record([
                "epoch",
                "kappa_grad",
                "kappa_anchor",
                "resultant_grad",
                "resultant_anchor",
                "mean_grad_norm",
            ])?;
        }
        for r in &self.records {
            w.serialize(CsvRow {
                epoch: r.epoch,
                kappa_grad: r.kappa_grad,
                kappa_anchor: r.kappa_anchor,
                resultant_grad: r.resultant_grad,
                resultant_anchor: r.resultant_anchor,
                mean_grad_norm: r.mean_grad_norm,
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Manifest describing how an [`SgdTrace`] was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdManifest {
    pub d: usize,
    pub n_b: usize,
    pub conditions: Vec<f64>,
    pub lr: f64,
    pub epochs: usize,
    pub seed: RngStream,
    pub stopped_early: bool,
}

fn record(ens: &QuadraticEnsemble, w: &[f64], epoch: usize) -> Result<EpochRecord> {
    let d = ens.dim();
    let mut grad_units = Vec::with_capacity(ens.len());
    let mut anchor_units = Vec::with_capacity(ens.len());
    let mut norm_sum = 0.0;
    for (i, p) in ens.anchors().iter().enumerate() {
        let g = quadratic_minibatch_gradient(ens, i, w)?;
        let ng = norm(&g);
        norm_sum += ng;
        if ng > ZERO_NORM_THRESHOLD {
            grad_units.push(g.iter().map(|x| x / ng).collect::<Vec<_>>());
        }
        let dir: Vec<f64> = p.iter().zip(w).map(|(p, w)| p - w).collect();
        let nd = norm(&dir);
        if !(nd > MIN_ANCHOR_DISTANCE) {
            return Err(Error::AnchorTooClose { index: i, distance: nd });
        }
        anchor_units.push(dir.iter().map(|x| x / nd).collect::<Vec<_>>());
    }
    let resultant_grad = norm(&pairwise_vector_sum(&grad_units));
    let resultant_anchor = norm(&pairwise_vector_sum(&anchor_units));
    Ok(EpochRecord {
        epoch,
        w: w.to_vec(),
        kappa_grad: if grad_units.is_empty() { 0.0 } else { h(resultant_grad, grad_units.len(), d)? },
        kappa_anchor: h(resultant_anchor, anchor_units.len(), d)?,
        resultant_grad,
        resultant_anchor,
        mean_grad_norm: norm_sum / ens.len() as f64,
    })
}

fn near_anchor(ens: &QuadraticEnsemble, w: &[f64]) -> bool {
    ens.anchors()
        .iter()
        .any(|p| dist_sq(p, w).sqrt() <= MIN_ANCHOR_DISTANCE)
}

/// Runs `epochs` passes of `w ← w + lr ĝ_i(w)` over a seeded permutation of
/// the members, recording the state at each epoch boundary (`epochs + 1`
/// records unless stopped early).
pub fn run_sgd_epochs(
    ens: &QuadraticEnsemble,
    w0: &[f64],
    lr: f64,
    epochs: usize,
    stream: RngStream,
) -> Result<SgdTrace> {
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::InvalidLearningRate(lr));
    }
    check_dims(ens.dim(), w0.len())?;
    let mut w = w0.to_vec();
    let mut trace = SgdTrace {
        lr,
        epochs_requested: epochs,
        records: vec![record(ens, &w, 0)?],
        stopped_early: false,
        alignment_checks: 0,
        alignment_violations: 0,
        max_alignment_ratio: 0.0,
    };
    let mut order: Vec<usize> = (0..ens.len()).collect();
    'epochs: for t in 0..epochs {
        let mut rng = stream.child(t as u64).rng();
        order.shuffle(&mut rng);
        for &i in &order {
            let g = quadratic_minibatch_gradient(ens, i, &w)?;
            if let Some(disc) = direction_discrepancy(&ens.anchors()[i], &w, &g) {
                let bound = ens.alignment_bound(i);
                trace.alignment_checks += 1;
                // Allow rounding at the level of the unit vectors involved.
                if disc > bound + 1e-12 {
                    trace.alignment_violations += 1;
                }
                if bound > 0.0 {
                    trace.max_alignment_ratio = trace.max_alignment_ratio.max(disc / bound);
                }
            }
            for (wi, gi) in w.iter_mut().zip(&g) {
                *wi += lr * gi;
            }
            if near_anchor(ens, &w) {
                trace.stopped_early = true;
                break 'epochs;
            }
        }
        trace.records.push(record(ens, &w, t + 1)?);
    }
    Ok(trace)
}

/// Learning rate for which one epoch of steps, each of length at most
/// `lr ‖ĝ_i(w)‖`, moves `w` by no more than `fraction · min_i ‖p_i − w‖`.
pub fn displacement_capped_lr(ens: &QuadraticEnsemble, w: &[f64], fraction: f64) -> Result<f64> {
    check_dims(ens.dim(), w.len())?;
    let mut total = 0.0;
    let mut r_min = f64::INFINITY;
    for (i, p) in ens.anchors().iter().enumerate() {
        total += norm(&quadratic_minibatch_gradient(ens, i, w)?);
        r_min = r_min.min(dist_sq(p, w).sqrt());
    }
    if !(total > 0.0) {
        return Err(Error::InvalidInput("all gradients vanish at w".into()));
    }
    Ok(fraction * r_min / total)
}

impl SgdManifest {
    pub fn new(ens: &QuadraticEnsemble, trace: &SgdTrace, seed: RngStream) -> Self {
        Self {
            d: ens.dim(),
            n_b: ens.len(),
            conditions: ens.conditions().to_vec(),
            lr: trace.lr,
            epochs: trace.epochs_requested,
            seed,
            stopped_early: trace.stopped_early,
        }
    }
}
