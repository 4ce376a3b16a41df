//! Dense vectors, unit vectors and accurate reductions over long slices.
//!
//! Reductions use pairwise (tree) summation with a small unrolled base case;
//! the rounding error grows like `O(log d)` instead of `O(d)`, which matters
//! at the parameter counts handled here (up to ~2e6 components).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm threshold below which a vector has no usable direction.
pub const ZERO_NORM_THRESHOLD: f64 = 1e-12;

/// Tolerance on `| ||x|| - 1 |` for a [`UnitVector`].
pub const UNIT_TOLERANCE: f64 = 1e-12;

const PAIRWISE_BLOCK: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    /// Wraps `components`, rejecting empty input and non-finite entries.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyInput("vector has no components"));
        }
        if let Some(i) = components.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "component {i} is not finite ({})",
                components[i]
            )));
        }
        Ok(Self(components))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn dot(&self, other: &DenseVector) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(dot(&self.0, &other.0))
    }

    pub fn scaled(&self, factor: f64) -> DenseVector {
        DenseVector(self.0.iter().map(|x| x * factor).collect())
    }

    pub fn add(&self, other: &DenseVector) -> Result<DenseVector> {
        check_dims(self.dim(), other.dim())?;
        Ok(DenseVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &DenseVector) -> Result<DenseVector> {
        check_dims(self.dim(), other.dim())?;
        Ok(DenseVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: f64, other: &DenseVector) -> Result<DenseVector> {
        check_dims(self.dim(), other.dim())?;
        Ok(DenseVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + factor * b)
                .collect(),
        ))
    }
}

impl From<UnitVector> for DenseVector {
    fn from(u: UnitVector) -> Self {
        DenseVector(u.0)
    }
}

impl AsRef<[f64]> for DenseVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A point on the unit hypersphere `S^{d-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Accepts `components` only if they already have unit norm within
    /// [`UNIT_TOLERANCE`].
    pub fn from_unit_components(components: Vec<f64>) -> Result<Self> {
        let v = DenseVector::new(components)?;
        let n = v.norm();
        if (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::Domain {
                what: "unit vector norm",
                value: n,
                domain: "1 +/- 1e-12",
            });
        }
        Ok(Self(v.0))
    }

    /// Normalizes a raw slice. Used by samplers that build components in place.
    pub fn normalize_slice(components: &[f64]) -> Result<Self> {
        let n = norm(components);
        if !(n > ZERO_NORM_THRESHOLD) || !n.is_finite() {
            return Err(Error::ZeroVector { norm: n });
        }
        Ok(Self(components.iter().map(|x| x / n).collect()))
    }

    /// Wraps components the caller has just normalized.
    pub(crate) fn from_normalized(components: Vec<f64>) -> Self {
        debug_assert!((norm(&components) - 1.0).abs() <= 1e-9);
        Self(components)
    }

    pub fn basis(dim: usize, axis: usize) -> Self {
        Self(DenseVector::basis(dim, axis).0)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &UnitVector) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(dot(&self.0, &other.0))
    }

    pub fn negated(&self) -> UnitVector {
        UnitVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn to_dense(&self) -> DenseVector {
        DenseVector(self.0.clone())
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// `v / ||v||`; fails with [`Error::ZeroVector`] when `||v|| <= 1e-12`.
pub fn normalize(v: &DenseVector) -> Result<UnitVector> {
    UnitVector::normalize_slice(v.as_slice())
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Pairwise sum of a slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        let mut acc = [0.0f64; 4];
        let chunks = xs.chunks_exact(4);
        let rem = chunks.remainder();
        for c in chunks {
            acc[0] += c[0];
            acc[1] += c[1];
            acc[2] += c[2];
            acc[3] += c[3];
        }
        let mut tail = 0.0;
        for x in rem {
            tail += x;
        }
        return (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Inner product with pairwise accumulation. Slices must have equal length.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= PAIRWISE_BLOCK {
        let mut acc = [0.0f64; 4];
        let ca = a.chunks_exact(4);
        let cb = b.chunks_exact(4);
        let (ra, rb) = (ca.remainder(), cb.remainder());
        for (x, y) in ca.zip(cb) {
            acc[0] += x[0] * y[0];
            acc[1] += x[1] * y[1];
            acc[2] += x[2] * y[2];
            acc[3] += x[3] * y[3];
        }
        let mut tail = 0.0;
        for (x, y) in ra.iter().zip(rb) {
            tail += x * y;
        }
        return (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail;
    }
    let mid = a.len() / 2;
    dot(&a[..mid], &b[..mid]) + dot(&a[mid..], &b[mid..])
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// Squared Euclidean distance `||a - b||^2`, pairwise accumulated.
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= PAIRWISE_BLOCK {
        let mut s = 0.0;
        for (x, y) in a.iter().zip(b) {
            let d = x - y;
            s += d * d;
        }
        return s;
    }
    let mid = a.len() / 2;
    dist_sq(&a[..mid], &b[..mid]) + dist_sq(&a[mid..], &b[mid..])
}

/// Component-wise tree sum of equally sized vectors.
pub fn pairwise_vector_sum<V: AsRef<[f64]>>(vectors: &[V]) -> Vec<f64> {
    match vectors.len() {
        0 => Vec::new(),
        1 => vectors[0].as_ref().to_vec(),
        n => {
            let mut left = pairwise_vector_sum(&vectors[..n / 2]);
            let right = pairwise_vector_sum(&vectors[n / 2..]);
            for (l, r) in left.iter_mut().zip(&right) {
                *l += r;
            }
            left
        }
    }
}

/// Streaming vector sum with Neumaier compensation per component.
///
/// Memory is `2 d`; used where the summands cannot be held at once.
#[derive(Debug, Clone)]
pub struct CompensatedVectorSum {
    sum: Vec<f64>,
    comp: Vec<f64>,
    count: usize,
}

impl CompensatedVectorSum {
    pub fn new(dim: usize) -> Self {
        Self {
            sum: vec![0.0; dim],
            comp: vec![0.0; dim],
            count: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.sum.len()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Overrides the term count, for callers that pre-reduce batches of terms.
    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    /// Adds `scale * x`.
    pub fn add_scaled(&mut self, scale: f64, x: &[f64]) {
        debug_assert_eq!(x.len(), self.sum.len());
        for ((s, c), &xi) in self.sum.iter_mut().zip(self.comp.iter_mut()).zip(x) {
            let v = scale * xi;
            let t = *s + v;
            if s.abs() >= v.abs() {
                *c += (*s - t) + v;
            } else {
                *c += (v - t) + *s;
            }
            *s = t;
        }
        self.count += 1;
    }

    pub fn add(&mut self, x: &[f64]) {
        self.add_scaled(1.0, x);
    }

    /// Folds another accumulator into this one.
    pub fn merge(&mut self, other: &CompensatedVectorSum) {
        debug_assert_eq!(other.sum.len(), self.sum.len());
        for i in 0..self.sum.len() {
            let v = other.sum[i];
            let s = self.sum[i];
            let t = s + v;
            let lost = if s.abs() >= v.abs() {
                (s - t) + v
            } else {
                (v - t) + s
            };
            self.sum[i] = t;
            self.comp[i] += lost + other.comp[i];
        }
        self.count += other.count;
    }

    pub fn value(&self) -> Vec<f64> {
        self.sum.iter().zip(&self.comp).map(|(s, c)| s + c).collect()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.value())
    }
}
