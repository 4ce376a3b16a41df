//! Epoch-series correlations between κ̂, GS and GNS read back from `metrics.csv`.

use std::io::Read;

use serde::{Deserialize, Serialize};

use super::train::MetricsRecord;
use crate::error::{Error, Result};
use crate::stats::pearson;
use crate::stochasticity::ReportFlags;

pub const MIN_REPORT_ROWS: usize = 10;

pub fn read_metrics_csv<R: Read>(input: R) -> Result<Vec<MetricsRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in rdr.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub rows: usize,
    pub used: usize,
    pub skipped_flagged: usize,
    /// Rows dropped because a logged quantity was not strictly positive and finite.
    pub skipped_nonpositive: usize,
    /// corr(log κ̂, log(1/GS)).
    pub corr_kappa_vs_inv_gs: Option<f64>,
    /// corr(log(1/GNS), log(1/GS)).
    pub corr_inv_gns_vs_inv_gs: Option<f64>,
    pub difference: Option<f64>,
    /// Set when either correlation has a constant column or too few rows.
    pub undefined: bool,
}

/// Correlations over epochs; flagged rows and rows with a nonpositive
/// κ̂, GS or GNS are skipped and counted.
pub fn correlation_report(rows: &[MetricsRecord]) -> Result<CorrelationReport> {
    if rows.len() < MIN_REPORT_ROWS {
        return Err(Error::InsufficientRows {
            needed: MIN_REPORT_ROWS,
            found: rows.len(),
        });
    }
    let (mut lk, mut lgs, mut lgns) = (Vec::new(), Vec::new(), Vec::new());
    let (mut flagged, mut nonpos) = (0, 0);
    for r in rows {
        let flags: ReportFlags = r.flags.parse()?;
        if flags.any() {
            flagged += 1;
            continue;
        }
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !(ok(r.kappa_hat) && ok(r.gs) && ok(r.gns)) {
            nonpos += 1;
            continue;
        }
        lk.push(r.kappa_hat.ln());
        lgs.push(-r.gs.ln());
        lgns.push(-r.gns.ln());
    }
    let a = pearson(&lk, &lgs);
    let b = pearson(&lgns, &lgs);
    Ok(CorrelationReport {
        rows: rows.len(),
        used: lk.len(),
        skipped_flagged: flagged,
        skipped_nonpositive: nonpos,
        corr_kappa_vs_inv_gs: a,
        corr_inv_gns_vs_inv_gs: b,
        difference: a.zip(b).map(|(a, b)| a - b),
        undefined: a.is_none() || b.is_none(),
    })
}
