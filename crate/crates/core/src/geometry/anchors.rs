//! Resultant of unit directions from a point `w` toward anchors `p_i`, and how
//! it changes when `w` moves along the summed directions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dims, dist_sq, dot, norm, norm_sq, pairwise_vector_sum};

/// Anchors closer than this to the current point have no direction.
pub const MIN_ANCHOR_DISTANCE: f64 = 1e-10;

/// Directions agreeing within this (in norm) count as colinear.
pub const COLINEAR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    anchors: Vec<Vec<f64>>,
    current: Vec<f64>,
    directions: Vec<Vec<f64>>,
    distances: Vec<f64>,
    colinear: bool,
}

fn unit_directions(anchors: &[Vec<f64>], w: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut dirs = Vec::with_capacity(anchors.len());
    let mut dists = Vec::with_capacity(anchors.len());
    for (index, p) in anchors.iter().enumerate() {
        check_dims(w.len(), p.len())?;
        let distance = dist_sq(p, w).sqrt();
        if !(distance > MIN_ANCHOR_DISTANCE) {
            return Err(Error::AnchorTooClose { index, distance });
        }
        dirs.push(p.iter().zip(w).map(|(a, b)| (a - b) / distance).collect());
        dists.push(distance);
    }
    Ok((dirs, dists))
}

impl AnchorSet {
    pub fn new(anchors: Vec<Vec<f64>>, current: Vec<f64>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::EmptyInput("anchor set is empty"));
        }
        if current.is_empty() {
            return Err(Error::EmptyInput("current point has no components"));
        }
        let all_finite = current.iter().chain(anchors.iter().flatten()).all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::InvalidInput("anchor set has a non-finite entry".into()));
        }
        let (directions, distances) = unit_directions(&anchors, &current)?;
        let colinear = directions
            .iter()
            .all(|x| dist_sq(x, &directions[0]).sqrt() <= COLINEAR_TOLERANCE);
        Ok(Self {
            anchors,
            current,
            directions,
            distances,
            colinear,
        })
    }

    pub fn n_b(&self) -> usize {
        self.anchors.len()
    }

    pub fn dim(&self) -> usize {
        self.current.len()
    }

    pub fn anchors(&self) -> &[Vec<f64>] {
        &self.anchors
    }

    pub fn current(&self) -> &[f64] {
        &self.current
    }

    /// Unit vectors `x_i = (p_i − w)/‖p_i − w‖`.
    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    /// `r = min_i ‖p_i − w‖`.
    pub fn min_distance(&self) -> f64 {
        self.distances.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_colinear(&self) -> bool {
        self.colinear
    }

    /// `Σ x_i`.
    pub fn direction_sum(&self) -> Vec<f64> {
        pairwise_vector_sum(&self.directions)
    }

    /// The same anchors seen from a different point.
    pub fn moved_to(&self, current: Vec<f64>) -> Result<Self> {
        Self::new(self.anchors.clone(), current)
    }
}

/// `‖Σ_i x_i‖`.
pub fn resultant_norm(anchors: &AnchorSet) -> f64 {
    norm(&anchors.direction_sum())
}

fn shifted_resultant_sq(anchors: &AnchorSet, eps: f64, step_dir: &[f64]) -> Result<f64> {
    check_dims(anchors.dim(), step_dir.len())?;
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Domain {
            what: "eps",
            value: eps,
            domain: "[0, inf)",
        });
    }
    let w: Vec<f64> = anchors
        .current()
        .iter()
        .zip(step_dir)
        .map(|(w, s)| w + eps * s)
        .collect();
    let (dirs, _) = unit_directions(anchors.anchors(), &w)?;
    Ok(norm_sq(&pairwise_vector_sum(&dirs)))
}

/// `f(ε) = ‖Σ_j (p_j − w − ε s)/‖p_j − w − ε s‖‖²`, the squared resultant
/// after moving the current point to `w + ε s`.
pub fn f_of_eps(anchors: &AnchorSet, eps: f64, step_dir: &[f64]) -> Result<f64> {
    shifted_resultant_sq(anchors, eps, step_dir)
}

/// `f'(0)` for the step `s = Σ x_i`:
/// `−2 Σ_j (‖u‖² − ⟨u, x_j⟩²)/‖p_j − w‖` with `u = −Σ x_i`.
/// Never positive; zero exactly when the anchors lie on one ray from `w`.
pub fn analytic_fprime0(anchors: &AnchorSet) -> f64 {
    if anchors.is_colinear() {
        return 0.0;
    }
    let u: Vec<f64> = anchors.direction_sum().into_iter().map(|x| -x).collect();
    let u2 = norm_sq(&u);
    let total: f64 = anchors
        .directions()
        .iter()
        .zip(anchors.distances())
        .map(|(x, r)| {
            let c = dot(&u, x);
            // Cauchy-Schwarz keeps each term nonnegative; clip rounding.
            (u2 - c * c).max(0.0) / r
        })
        .sum();
    -2.0 * total
}

/// Largest perturbation norm `ξ = |f'(0)| r / (4 n_b²)` under which a step
/// along the perturbed direction sum still shrinks the resultant.
pub fn theorem3_xi_threshold(anchors: &AnchorSet) -> f64 {
    if anchors.is_colinear() {
        return 0.0;
    }
    let nb = anchors.n_b() as f64;
    analytic_fprime0(anchors).abs() * anchors.min_distance() / (4.0 * nb * nb)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecreaseCheck {
    pub decreased: bool,
    /// Resultant norm after the perturbed step.
    pub lhs: f64,
    /// Resultant norm before the step.
    pub rhs: f64,
}

/// Steps from `w` by `eps` along `Σ x_i − perturbation` and compares the
/// resultant norms before and after.
pub fn perturbed_decrease_check(anchors: &AnchorSet, perturbation: &[f64], eps: f64) -> Result<DecreaseCheck> {
    check_dims(anchors.dim(), perturbation.len())?;
    let threshold = theorem3_xi_threshold(anchors);
    let pn = norm(perturbation);
    if !(pn < threshold) {
        return Err(Error::PerturbationTooLarge { norm: pn, threshold });
    }
    let dir: Vec<f64> = anchors
        .direction_sum()
        .iter()
        .zip(perturbation)
        .map(|(s, d)| s - d)
        .collect();
    let lhs = shifted_resultant_sq(anchors, eps, &dir)?.sqrt();
    let rhs = resultant_norm(anchors);
    Ok(DecreaseCheck {
        decreased: lhs < rhs,
        lhs,
        rhs,
    })
}
