use gradcompass::directional::{angle_degrees, asymptotic_angle_params, fill_uniform_sphere};
use gradcompass::stats::{excess_kurtosis, mean, skewness, std_dev};
use gradcompass::RngStream;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::require;
use crate::args::AngleArgs;
use crate::error::CliResult;
use crate::manifest::Outputs;

pub const MIN_PAIRS: usize = 100;

#[derive(Serialize)]
struct AngleRow {
    pair: usize,
    angle_deg: f64,
}

pub fn run(a: &AngleArgs, out: &mut Outputs) -> CliResult<serde_json::Value> {
    require(a.dim >= 2, || format!("--dim must be at least 2, got {}", a.dim))?;
    require(a.pairs >= MIN_PAIRS, || format!("--pairs must be at least {MIN_PAIRS}, got {}", a.pairs))?;

    let stream = RngStream::new(a.common.seed, 0);
    let angles: Vec<f64> = (0..a.pairs)
        .into_par_iter()
        .map_init(
            || (vec![0.0; a.dim], vec![0.0; a.dim]),
            |(u, v), i| {
                let mut rng = stream.child(i as u64).rng();
                fill_uniform_sphere(u, &mut rng);
                fill_uniform_sphere(v, &mut rng);
                angle_degrees(u, v)
            },
        )
        .collect::<gradcompass::Result<_>>()?;

    let mut w = out.csv_writer("angles.csv")?;
    for (pair, &angle_deg) in angles.iter().enumerate() {
        w.serialize(AngleRow { pair, angle_deg })?;
    }
    w.flush()?;

    let target = asymptotic_angle_params(a.dim);
    let summary = json!({
        "dim": a.dim,
        "pairs": a.pairs,
        "mean_deg": mean(&angles),
        "std_deg": std_dev(&angles),
        "skewness": skewness(&angles),
        "excess_kurtosis": excess_kurtosis(&angles),
        "asymptotic_mean_deg": target.asymptotic_mean,
        "asymptotic_std_deg": target.asymptotic_std,
    });
    out.write_json("summary.json", &summary)?;
    Ok(summary)
}
