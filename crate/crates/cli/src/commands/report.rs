use std::fs::File;
use std::io::BufReader;

use gradcompass::nn::{correlation_report, read_metrics_csv};
use serde_json::json;

use crate::args::ReportArgs;
use crate::error::CliResult;
use crate::manifest::Outputs;

pub fn run(a: &ReportArgs, out: &mut Outputs) -> CliResult<serde_json::Value> {
    let rows = read_metrics_csv(BufReader::new(File::open(&a.metrics)?))?;
    let report = correlation_report(&rows)?;
    out.write_json("correlation.json", &report)?;
    if let Some(diff) = report.difference {
        eprintln!(
            "corr(log κ̂, log 1/GS) − corr(log 1/GNS, log 1/GS) = {diff:+.4} over {} rows",
            report.used
        );
    } else {
        eprintln!("correlations undefined over {} usable rows", report.used);
    }
    Ok(json!({ "metrics": a.metrics, "report": report }))
}
