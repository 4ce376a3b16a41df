//! Angles between vectors and their high-dimensional normal limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dims, dot, norm, UnitVector, ZERO_NORM_THRESHOLD};
use crate::stats;

/// Angle in degrees, with the cosine clamped to `[-1, 1]`.
pub fn angle_degrees(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u.len(), v.len())?;
    let (nu, nv) = (norm(u), norm(v));
    for n in [nu, nv] {
        if !(n > ZERO_NORM_THRESHOLD) {
            return Err(Error::ZeroVector { norm: n });
        }
    }
    let cos = (dot(u, v) / (nu * nv)).clamp(-1.0, 1.0);
    Ok(cos.acos().to_degrees())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSummary {
    pub count: usize,
    /// Samples dropped because their norm was degenerate.
    pub skipped: usize,
    pub mean_deg: f64,
    pub std_deg: f64,
    pub asymptotic_mean: f64,
    pub asymptotic_std: f64,
}

/// Limit law of the angle between independent uniform directions:
/// mean 90°, standard deviation `180/(π√d)` degrees.
pub fn asymptotic_angle_params(d: usize) -> AngleSummary {
    let asymptotic_std = 180.0 / (std::f64::consts::PI * (d as f64).sqrt());
    AngleSummary {
        count: 0,
        skipped: 0,
        mean_deg: f64::NAN,
        std_deg: f64::NAN,
        asymptotic_mean: 90.0,
        asymptotic_std,
    }
}

impl AngleSummary {
    pub fn from_angles(angles: &[f64], d: usize, skipped: usize) -> Self {
        let base = asymptotic_angle_params(d);
        let std_deg = if angles.len() < 2 { 0.0 } else { stats::std_dev(angles) };
        AngleSummary {
            count: angles.len(),
            skipped,
            mean_deg: stats::mean(angles),
            std_deg,
            ..base
        }
    }

    /// Empirical std divided by the asymptotic std.
    pub fn std_ratio(&self) -> f64 {
        self.std_deg / self.asymptotic_std
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleProfile {
    pub summary: AngleSummary,
    pub angles: Vec<f64>,
}

/// Angles of each sample against `reference`. Degenerate samples are skipped
/// and counted in [`AngleSummary::skipped`].
pub fn empirical_angle_profile<V: AsRef<[f64]>>(
    samples: &[V],
    reference: &UnitVector,
) -> Result<AngleProfile> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("no samples for angle profile"));
    }
    let d = reference.dim();
    let mut angles = Vec::with_capacity(samples.len());
    let mut skipped = 0;
    for s in samples {
        match angle_degrees(s.as_ref(), reference.as_slice()) {
            Ok(a) => angles.push(a),
            Err(Error::ZeroVector { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if angles.is_empty() {
        return Err(Error::EmptyInput("every sample was degenerate"));
    }
    Ok(AngleProfile {
        summary: AngleSummary::from_angles(&angles, d, skipped),
        angles,
    })
}
