use gradcompass::nn::{run_training, EpochMetrics, TrainConfig};
use serde::Serialize;
use serde_json::json;

use super::load_mnist;
use crate::args::TrainArgs;
use crate::error::CliResult;
use crate::manifest::Outputs;

#[derive(Serialize)]
struct AngleRow {
    sample: usize,
    angle_deg: f64,
}

pub fn run(a: &TrainArgs, out: &mut Outputs) -> CliResult<serde_json::Value> {
    let cfg = TrainConfig {
        batch_size: a.batch_size,
        learning_rate: a.lr,
        epochs: a.epochs,
        seed: a.common.seed,
        train_subset_size: a.train_subset,
        n_s: a.n_s,
        instrument_every: a.instrument_every,
        angle_epochs: a.angle_epochs.clone(),
    };
    cfg.validate()?;
    let (train, valid) = load_mnist(&a.mnist_dir)?;
    let valid = (!a.no_valid).then_some(&valid);
    let outcome = run_training(&cfg, &train, valid, |m| {
        eprintln!(
            "epoch {:3}: train loss {:.4}, acc {:.4}, gs {:.4}, gns {:.3}, κ̂ {:.1}",
            m.epoch, m.train_loss, m.train_accuracy, m.gs, m.gns, m.kappa_hat
        );
    })?;

    EpochMetrics::write_csv(&outcome.metrics, std::fs::File::create(out.path("metrics.csv"))?)?;
    let mut angle_summaries = Vec::new();
    for (epoch, profile) in &outcome.angles {
        let mut w = out.csv_writer(&format!("angles_epoch{epoch}.csv"))?;
        for (sample, &angle_deg) in profile.angles.iter().enumerate() {
            w.serialize(AngleRow { sample, angle_deg })?;
        }
        w.flush()?;
        angle_summaries.push(json!({ "epoch": epoch, "summary": profile.summary }));
    }
    let last = outcome.metrics.last();
    Ok(json!({
        "dim": outcome.model.dim(),
        "epoch_losses": outcome.epoch_losses,
        "final_train_accuracy": last.map(|m| m.train_accuracy),
        "final_valid_accuracy": last.and_then(|m| m.valid_accuracy),
        "angles": angle_summaries,
    }))
}
