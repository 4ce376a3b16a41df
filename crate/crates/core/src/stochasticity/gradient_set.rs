use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dims, dot, pairwise_vector_sum, DenseVector};

/// Per-example negative gradients `g_i(w)` at one parameter `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    grads: Vec<Vec<f64>>,
    d: usize,
}

impl GradientSet {
    pub fn new(gradients: Vec<DenseVector>) -> Result<Self> {
        Self::from_rows(gradients.into_iter().map(DenseVector::into_inner).collect())
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a gradient set needs at least 2 gradients, got {}",
                rows.len()
            )));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::EmptyInput("gradients have no components"));
        }
        for (i, r) in rows.iter().enumerate() {
            check_dims(d, r.len())?;
            if r.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("gradient {i} has a non-finite entry")));
            }
        }
        Ok(Self { grads: rows, d })
    }

    pub fn n(&self) -> usize {
        self.grads.len()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.grads
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.grads[i]
    }

    /// Gram matrix `G_ij = ⟨g_i, g_j⟩`, row-major `n × n`.
    pub fn gram(&self) -> Vec<f64> {
        let n = self.n();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = dot(&self.grads[i], &self.grads[j]);
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        g
    }
}

/// Mean of the per-example gradients, i.e. the full-batch negative gradient.
pub fn full_gradient(gs: &GradientSet) -> DenseVector {
    let n = gs.n() as f64;
    let sum = pairwise_vector_sum(gs.rows());
    DenseVector::new(sum.into_iter().map(|x| x / n).collect()).expect("finite mean of finite rows")
}

/// `max_{i,j} |⟨g_i, g_j⟩|` over all ordered pairs, diagonal included.
pub fn gamma_max_inner(gs: &GradientSet) -> f64 {
    gs.gram().into_iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinibatchSpec {
    m: usize,
}

impl MinibatchSpec {
    /// Batch size `m` for a population of `n`; requires `1 <= m <= n`.
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidSpec { m, n });
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if self.m == 0 || self.m > n {
            Err(Error::InvalidSpec { m: self.m, n })
        } else {
            Ok(())
        }
    }
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n as u128 - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}
