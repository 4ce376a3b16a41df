//! Exact minibatch norm moments by enumerating every size-`m` subset.

use serde::{Deserialize, Serialize};

use super::gradient_set::{binomial, full_gradient, gamma_max_inner, GradientSet, MinibatchSpec};
use crate::error::{Error, Result};
use crate::linalg::{norm, norm_sq, pairwise_vector_sum};

/// Largest number of subsets [`enumerate_minibatch_moments`] will visit.
pub const ENUMERATION_CAP: u64 = 1_000_000;

/// Running sums are recomputed from scratch this often to stop drift.
const REFRESH_EVERY: u64 = 256;

/// Revolving-door (minimal change) order over the `k`-subsets of `0..n`.
///
/// Consecutive subsets differ by exactly one element swapped out and one
/// swapped in.
#[derive(Debug, Clone)]
pub struct RevolvingDoor {
    // c[1..=k] ascending, c[k + 1] = n sentinel; c[0] unused.
    c: Vec<usize>,
    k: usize,
    first: bool,
    done: bool,
}

impl RevolvingDoor {
    pub fn new(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= n, "need 1 <= k <= n");
        let mut c = vec![0; k + 2];
        for (j, cj) in c.iter_mut().enumerate().take(k + 1).skip(1) {
            *cj = j - 1;
        }
        c[k + 1] = n;
        Self {
            c,
            k,
            first: true,
            done: false,
        }
    }

    pub fn current(&self) -> &[usize] {
        &self.c[1..=self.k]
    }

    fn advance(&mut self) -> bool {
        let t = self.k;
        let c = &mut self.c;
        let mut j;
        let mut increase;
        if t % 2 == 1 {
            if c[1] + 1 < c[2] {
                c[1] += 1;
                return true;
            }
            j = 2;
            increase = false;
        } else {
            if c[1] > 0 {
                c[1] -= 1;
                return true;
            }
            j = 2;
            increase = true;
        }
        loop {
            if j > t {
                return false;
            }
            if !increase {
                // c[j] = c[j-1] + 1 here; try to move c[j] down.
                if c[j] >= j {
                    c[j] = c[j - 1];
                    c[j - 1] = j - 2;
                    return true;
                }
                j += 1;
            }
            // c[j-1] = j - 2 here; try to move c[j] up.
            if j > t {
                return false;
            }
            if c[j] + 1 < c[j + 1] {
                c[j - 1] = c[j];
                c[j] += 1;
                return true;
            }
            j += 1;
            if j > t {
                return false;
            }
            increase = false;
        }
    }

    /// Moves to the next subset. Returns `false` once all have been visited.
    pub fn step(&mut self) -> bool {
        if self.done {
            return false;
        }
        if self.first {
            self.first = false;
            return true;
        }
        if !self.advance() {
            self.done = true;
            return false;
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactMoments {
    pub mean_norm: f64,
    pub second_moment: f64,
    pub var_norm: f64,
    pub full_grad_norm: f64,
    pub gamma: f64,
    pub subset_count: u64,
}

fn check_cap(n: usize, m: usize) -> Result<u64> {
    let count = binomial(n, m);
    if count > ENUMERATION_CAP {
        return Err(Error::TooManySubsets {
            n,
            m,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(count)
}

/// Calls `visit` with `ĝ = (1/m) Σ_{i∈I} g_i` for every size-`m` subset `I`.
pub(crate) fn for_each_minibatch_gradient(
    gs: &GradientSet,
    spec: MinibatchSpec,
    mut visit: impl FnMut(&[f64]),
) -> Result<u64> {
    spec.check(gs.n())?;
    let m = spec.m();
    let count = check_cap(gs.n(), m)?;
    let inv_m = 1.0 / m as f64;
    let mut door = RevolvingDoor::new(gs.n(), m);
    let mut prev: Vec<usize> = Vec::with_capacity(m);
    let mut sum = vec![0.0; gs.dim()];
    let mut ghat = vec![0.0; gs.dim()];
    let mut visited = 0u64;
    while door.step() {
        let cur = door.current();
        if visited.is_multiple_of(REFRESH_EVERY) {
            let rows: Vec<&[f64]> = cur.iter().map(|&i| gs.row(i)).collect();
            sum = pairwise_vector_sum(&rows);
        } else {
            let out = prev.iter().find(|i| !cur.contains(i));
            let inn = cur.iter().find(|i| !prev.contains(i));
            if let (Some(&o), Some(&i)) = (out, inn) {
                for ((s, a), b) in sum.iter_mut().zip(gs.row(i)).zip(gs.row(o)) {
                    *s += a - b;
                }
            }
        }
        for (g, s) in ghat.iter_mut().zip(&sum) {
            *g = s * inv_m;
        }
        visit(&ghat);
        prev.clear();
        prev.extend_from_slice(cur);
        visited += 1;
    }
    debug_assert_eq!(visited, count);
    Ok(visited)
}

/// Exact `E‖ĝ‖`, `E‖ĝ‖²` and `Var‖ĝ‖` over the uniform law on size-`m` subsets.
pub fn enumerate_minibatch_moments(gs: &GradientSet, spec: MinibatchSpec) -> Result<ExactMoments> {
    spec.check(gs.n())?;
    check_cap(gs.n(), spec.m())?;
    // Welford on norms, Neumaier on squared norms.
    let (mut k, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
    let (mut s2, mut c2) = (0.0f64, 0.0f64);
    let count = for_each_minibatch_gradient(gs, spec, |g| {
        let sq = norm_sq(g);
        let nv = sq.sqrt();
        k += 1.0;
        let delta = nv - mean;
        mean += delta / k;
        m2 += delta * (nv - mean);
        let t = s2 + sq;
        c2 += if s2.abs() >= sq { (s2 - t) + sq } else { (sq - t) + s2 };
        s2 = t;
    })?;
    let full = full_gradient(gs);
    Ok(ExactMoments {
        mean_norm: mean,
        second_moment: (s2 + c2) / k,
        var_norm: (m2 / k).max(0.0),
        full_grad_norm: norm(full.as_slice()),
        gamma: gamma_max_inner(gs),
        subset_count: count,
    })
}

/// Closed-form `E‖ĝ‖²` from selector variables with
/// `E[s_i s_j] = (m/n) δ_ij + m(m−1)/(n(n−1)) (1 − δ_ij)`.
pub fn lemma_a1_second_moment(gs: &GradientSet, spec: MinibatchSpec) -> Result<f64> {
    spec.check(gs.n())?;
    let n = gs.n() as f64;
    let m = spec.m() as f64;
    let diag: f64 = gs.rows().iter().map(|g| norm_sq(g)).sum();
    let total = norm_sq(&pairwise_vector_sum(gs.rows()));
    let full_sq = total / (n * n);
    let a = 1.0 / (m * n) - (m - 1.0) / (m * n * (n - 1.0));
    let b = (m - 1.0) / (m * n * (n - 1.0)) - 1.0 / (n * n);
    Ok(full_sq + a * diag + b * total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Bounds {
    /// Bound on `E‖ĝ‖ − ‖g‖`.
    pub gap_bound: f64,
    /// Bound on `Var‖ĝ‖`.
    pub var_bound: f64,
    /// Bound on `√Var‖ĝ‖ / E‖ĝ‖`.
    pub ratio_bound: f64,
    /// Set when `‖g‖ = 0`; `gap_bound` and `ratio_bound` are then infinite.
    pub infinite: bool,
}

/// Upper bounds on the norm gap, norm variance and their ratio in terms of
/// `γ = max |⟨g_i, g_j⟩|`.
pub fn theorem1_bounds(gs: &GradientSet, spec: MinibatchSpec) -> Result<Theorem1Bounds> {
    spec.check(gs.n())?;
    let n = gs.n() as f64;
    let m = spec.m() as f64;
    let gamma = gamma_max_inner(gs);
    let g = norm(full_gradient(gs).as_slice());
    let factor = (n - m) / (m * (n - 1.0));
    let var_bound = 2.0 * factor * gamma;
    if g > 0.0 {
        Ok(Theorem1Bounds {
            gap_bound: factor * gamma / g,
            var_bound,
            ratio_bound: var_bound.sqrt() / g,
            infinite: false,
        })
    } else {
        Ok(Theorem1Bounds {
            gap_bound: f64::INFINITY,
            var_bound,
            ratio_bound: f64::INFINITY,
            infinite: true,
        })
    }
}
