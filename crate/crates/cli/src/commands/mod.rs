mod angles;
mod geometry;
mod norm;
mod report;
mod train;
mod vmf_bias;

use std::path::PathBuf;

use chrono::Utc;
use gradcompass::nn::{MnistDataset, MnistPaths};
use serde::Serialize;

use crate::args::Command;
use crate::error::{usage, CliResult};
use crate::manifest::Outputs;

/// Runs one subcommand and returns the path of its `run.json`.
pub fn run(cmd: &Command) -> CliResult<PathBuf> {
    let started = Utc::now();
    let (dir, seed, flags) = match cmd {
        Command::VmfBias(a) => (&a.common.out, Some(a.common.seed), flags_of(a)?),
        Command::AngleAsymptotics(a) => (&a.common.out, Some(a.common.seed), flags_of(a)?),
        Command::NormStochasticity(a) => (&a.common.out, Some(a.common.seed), flags_of(a)?),
        Command::Geometry(a) => (&a.common.out, Some(a.common.seed), flags_of(a)?),
        Command::Train(a) => (&a.common.out, Some(a.common.seed), flags_of(a)?),
        Command::Report(a) => (&a.out, None, flags_of(a)?),
    };
    let mut out = Outputs::new(dir)?;
    let summary = match cmd {
        Command::VmfBias(a) => vmf_bias::run(a, &mut out)?,
        Command::AngleAsymptotics(a) => angles::run(a, &mut out)?,
        Command::NormStochasticity(a) => norm::run(a, &mut out)?,
        Command::Geometry(a) => geometry::run(a, &mut out)?,
        Command::Train(a) => train::run(a, &mut out)?,
        Command::Report(a) => report::run(a, &mut out)?,
    };
    out.finish(cmd.name(), flags, seed, started, Some(summary))
}

fn flags_of<T: Serialize>(args: &T) -> CliResult<serde_json::Value> {
    Ok(serde_json::to_value(args)?)
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(usage(msg()))
    }
}

fn load_mnist(dir: &std::path::Path) -> CliResult<(MnistDataset, MnistDataset)> {
    Ok(MnistPaths::in_dir(dir).load()?)
}
