//! Plain SGD training and per-epoch gradient instrumentation.

use std::io::Write;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::idx::MnistDataset;
use super::model::{Batch, FnnModel};
use crate::directional::{angle_degrees, sample_uniform_sphere, AngleProfile, AngleSummary};
use crate::error::{Error, Result};
use crate::linalg::UnitVector;
use crate::rng::RngStream;
use crate::stochasticity::{
    for_each_sampled_gradient, GradientOracle, MinibatchSpec, ReportFlags, StochasticityAccumulator,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub train_subset_size: usize,
    /// Minibatch gradients drawn per instrumented epoch.
    pub n_s: usize,
    pub instrument_every: usize,
    /// Epochs at which angles against a fixed random reference are recorded.
    pub angle_epochs: Vec<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 64,
            learning_rate: 0.01,
            epochs: 30,
            seed: 0,
            train_subset_size: 10_000,
            n_s: 1000,
            instrument_every: 1,
            angle_epochs: vec![0, 30],
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.train_subset_size == 0 || self.instrument_every == 0 {
            return Err(Error::InvalidInput(
                "batch size, subset size and instrumentation interval must be positive".into(),
            ));
        }
        if self.batch_size > self.train_subset_size {
            return Err(Error::InvalidSpec {
                m: self.batch_size,
                n: self.train_subset_size,
            });
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidLearningRate(self.learning_rate));
        }
        if self.n_s < 2 {
            return Err(Error::InvalidInput(format!("n_s must be at least 2, got {}", self.n_s)));
        }
        Ok(())
    }

    pub fn init_stream(&self) -> RngStream {
        RngStream::new(self.seed, 0)
    }

    pub fn shuffle_stream(&self, epoch: usize) -> RngStream {
        RngStream::new(self.seed, 1).child(epoch as u64)
    }

    pub fn instrument_stream(&self, epoch: usize) -> RngStream {
        RngStream::new(self.seed, 2).child(epoch as u64)
    }

    pub fn reference_stream(&self) -> RngStream {
        RngStream::new(self.seed, 3)
    }

    pub fn is_instrumented(&self, epoch: usize) -> bool {
        epoch == 0 || epoch == self.epochs || epoch.is_multiple_of(self.instrument_every)
    }
}

/// One pass over a seeded shuffle in batches of `batch_size` (the last,
/// shorter batch is kept), applying `w ← w − lr ∇f_I(w)`. Returns the mean
/// per-example training loss seen during the pass.
pub fn sgd_epoch(
    model: &mut FnnModel,
    data: &MnistDataset,
    batch_size: usize,
    lr: f64,
    stream: RngStream,
    epoch: usize,
) -> Result<f64> {
    if batch_size == 0 {
        return Err(Error::InvalidSpec { m: 0, n: data.len() });
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut stream.rng());
    let mut total = 0.0;
    for (k, idx) in order.chunks(batch_size).enumerate() {
        let batch = Batch::gather(data, idx);
        let (loss, grad) = model.loss_and_gradient(&batch)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, batch: k, loss });
        }
        for (w, g) in model.params_mut().iter_mut().zip(&grad) {
            *w -= lr * g;
        }
        total += loss * idx.len() as f64;
    }
    Ok(total / data.len() as f64)
}

/// Minibatch negative gradients `−∇f_I(w)` of a frozen model.
pub struct FnnOracle<'a> {
    pub model: &'a FnnModel,
    pub data: &'a MnistDataset,
}

impl GradientOracle for FnnOracle<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn n_examples(&self) -> usize {
        self.data.len()
    }

    fn minibatch_gradient(&self, indices: &[usize]) -> Result<Vec<f64>> {
        let batch = Batch::gather(self.data, indices);
        let (_, mut g) = self.model.loss_and_gradient(&batch)?;
        g.iter_mut().for_each(|v| *v = -*v);
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub valid_loss: Option<f64>,
    pub train_accuracy: f64,
    pub valid_accuracy: Option<f64>,
    pub n_s: usize,
    pub gs: f64,
    pub gns: f64,
    pub kappa_hat: f64,
    pub flags: ReportFlags,
}

/// One row of `metrics.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub valid_loss: Option<f64>,
    pub gs: f64,
    pub gns: f64,
    pub kappa_hat: f64,
    pub flags: String,
}

impl From<&EpochMetrics> for MetricsRecord {
    fn from(r: &EpochMetrics) -> Self {
        Self {
            epoch: r.epoch,
            train_loss: r.train_loss,
            valid_loss: r.valid_loss,
            gs: r.gs,
            gns: r.gns,
            kappa_hat: r.kappa_hat,
            flags: r.flags.to_string(),
        }
    }
}

pub const METRICS_HEADER: [&str; 7] = ["epoch", "train_loss", "valid_loss", "gs", "gns", "kappa_hat", "flags"];

impl EpochMetrics {
    pub fn write_csv<W: Write>(rows: &[EpochMetrics], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if rows.is_empty() {
            w.write_record(METRICS_HEADER)?;
        }
        for r in rows {
            w.serialize(MetricsRecord::from(r))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Stochasticity metrics and (optionally) angles against `reference` from
/// one pass of `n_s` sampled minibatch gradients.
pub fn sample_gradient_statistics(
    model: &FnnModel,
    data: &MnistDataset,
    n_s: usize,
    spec: MinibatchSpec,
    stream: RngStream,
    reference: Option<&UnitVector>,
) -> Result<(StochasticityAccumulator, Option<AngleProfile>)> {
    let oracle = FnnOracle { model, data };
    let mut acc = StochasticityAccumulator::new(model.dim());
    let mut angles = Vec::new();
    let mut skipped = 0;
    for_each_sampled_gradient(&oracle, n_s, spec, stream, |_, g| {
        acc.push(g)?;
        if let Some(r) = reference {
            match angle_degrees(g, r.as_slice()) {
                Ok(a) => angles.push(a),
                Err(Error::ZeroVector { .. }) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(())
    })?;
    let profile = reference.map(|r| AngleProfile {
        summary: AngleSummary::from_angles(&angles, r.dim(), skipped),
        angles,
    });
    Ok((acc, profile))
}

/// Losses and sampled GS/GNS/κ̂ at the current parameters.
pub fn instrument(
    model: &FnnModel,
    train: &MnistDataset,
    valid: Option<&MnistDataset>,
    batch_size: usize,
    n_s: usize,
    stream: RngStream,
    epoch: usize,
) -> Result<EpochMetrics> {
    Ok(instrument_with_angles(model, train, valid, batch_size, n_s, stream, epoch, None)?.0)
}

#[allow(clippy::too_many_arguments)]
pub fn instrument_with_angles(
    model: &FnnModel,
    train: &MnistDataset,
    valid: Option<&MnistDataset>,
    batch_size: usize,
    n_s: usize,
    stream: RngStream,
    epoch: usize,
    reference: Option<&UnitVector>,
) -> Result<(EpochMetrics, Option<AngleProfile>)> {
    let spec = MinibatchSpec::new(batch_size, train.len())?;
    let (acc, angles) = sample_gradient_statistics(model, train, n_s, spec, stream, reference)?;
    let report = acc.report(epoch as u64)?;
    let (train_loss, train_accuracy) = model.evaluate(train)?;
    let (valid_loss, valid_accuracy) = match valid {
        Some(v) => {
            let (l, a) = model.evaluate(v)?;
            (Some(l), Some(a))
        }
        None => (None, None),
    };
    Ok((
        EpochMetrics {
            epoch,
            train_loss,
            valid_loss,
            train_accuracy,
            valid_accuracy,
            n_s,
            gs: report.gs,
            gns: report.gns,
            kappa_hat: report.kappa_hat,
            flags: report.flags,
        },
        angles,
    ))
}

/// Angles of `n_s` minibatch gradients against a fixed reference direction.
pub fn angle_profile_snapshot(
    model: &FnnModel,
    data: &MnistDataset,
    n_s: usize,
    batch_size: usize,
    stream: RngStream,
    reference: &UnitVector,
) -> Result<AngleProfile> {
    let spec = MinibatchSpec::new(batch_size, data.len())?;
    let oracle = FnnOracle { model, data };
    let mut angles = Vec::with_capacity(n_s);
    let mut skipped = 0;
    for_each_sampled_gradient(&oracle, n_s, spec, stream, |_, g| {
        match angle_degrees(g, reference.as_slice()) {
            Ok(a) => angles.push(a),
            Err(Error::ZeroVector { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
        Ok(())
    })?;
    if angles.is_empty() {
        return Err(Error::EmptyInput("every sampled gradient was zero"));
    }
    Ok(AngleProfile {
        summary: AngleSummary::from_angles(&angles, reference.dim(), skipped),
        angles,
    })
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub metrics: Vec<EpochMetrics>,
    pub angles: Vec<(usize, AngleProfile)>,
    pub model: FnnModel,
    pub epoch_losses: Vec<f64>,
}

/// Trains from a fresh Xavier init, instrumenting per the config. `on_epoch`
/// sees each metrics row as soon as it is produced.
pub fn run_training(
    cfg: &TrainConfig,
    train_full: &MnistDataset,
    valid: Option<&MnistDataset>,
    mut on_epoch: impl FnMut(&EpochMetrics),
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let train = train_full.head(cfg.train_subset_size);
    if train.len() < cfg.batch_size {
        return Err(Error::InsufficientRows {
            needed: cfg.batch_size,
            found: train.len(),
        });
    }
    let mut model = FnnModel::xavier(
        train.features,
        super::model::MNIST_HIDDEN,
        super::model::MNIST_CLASSES,
        cfg.init_stream(),
    );
    let reference = if cfg.angle_epochs.is_empty() {
        None
    } else {
        Some(sample_uniform_sphere(model.dim(), cfg.reference_stream())?)
    };
    let mut metrics = Vec::new();
    let mut angles = Vec::new();
    let mut epoch_losses = Vec::new();
    for epoch in 0..=cfg.epochs {
        if epoch > 0 {
            let loss = sgd_epoch(
                &mut model,
                &train,
                cfg.batch_size,
                cfg.learning_rate,
                cfg.shuffle_stream(epoch),
                epoch,
            )?;
            epoch_losses.push(loss);
        }
        if cfg.is_instrumented(epoch) {
            let r = if cfg.angle_epochs.contains(&epoch) { reference.as_ref() } else { None };
            let (m, a) = instrument_with_angles(
                &model,
                &train,
                valid,
                cfg.batch_size,
                cfg.n_s,
                cfg.instrument_stream(epoch),
                epoch,
                r,
            )?;
            on_epoch(&m);
            metrics.push(m);
            if let Some(a) = a {
                angles.push((epoch, a));
            }
        }
    }
    Ok(TrainOutcome {
        metrics,
        angles,
        model,
        epoch_losses,
    })
}
