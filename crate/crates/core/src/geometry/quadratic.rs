//! Ensembles of quadratic minibatch losses `f_i(w) = ½ (w − p_i)ᵀ H_i (w − p_i)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{check_dims, norm};
use crate::rng::RngStream;

/// Relative tolerance for the symmetry check on a Hessian.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Extreme eigenvalues of a symmetric positive definite matrix.
pub fn spd_extremes(h: &DMatrix<f64>) -> Result<(f64, f64)> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(Error::NotSpd(format!("shape {}x{}", h.nrows(), h.ncols())));
    }
    let scale = h.amax().max(f64::MIN_POSITIVE);
    let asym = (h - h.transpose()).amax();
    if asym > SYMMETRY_TOLERANCE * scale {
        return Err(Error::NotSpd(format!("asymmetry {asym:e}")));
    }
    let eig = SymmetricEigen::new(h.clone());
    let lo = eig.eigenvalues.min();
    let hi = eig.eigenvalues.max();
    if !(lo > 0.0) || !hi.is_finite() {
        return Err(Error::NotSpd(format!("smallest eigenvalue {lo:e}")));
    }
    Ok((lo, hi))
}

/// `√(2 − 2 λ_min/λ_max)`: the largest possible distance between the unit
/// vectors along `v` and `Hv`.
pub fn alignment_bound(h: &DMatrix<f64>) -> Result<f64> {
    let (lo, hi) = spd_extremes(h)?;
    Ok((2.0 - 2.0 * lo / hi).max(0.0).sqrt())
}

/// `Q diag(λ) Qᵀ` with `Q` from the QR factorization of a Gaussian matrix and
/// `λ` log-uniform on `[1, c]`.
pub fn random_spd<R: Rng + ?Sized>(d: usize, c: f64, rng: &mut R) -> DMatrix<f64> {
    assert!(c >= 1.0, "condition number target must be >= 1");
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let q = g.qr().q();
    let ln_c = c.ln();
    let lambda = DVector::<f64>::from_fn(d, |_, _| (rng.random::<f64>() * ln_c).exp());
    let h = &q * DMatrix::from_diagonal(&lambda) * q.transpose();
    // Symmetrize away rounding.
    (&h + h.transpose()) * 0.5
}

#[derive(Debug, Clone)]
pub struct QuadraticEnsemble {
    anchors: Vec<Vec<f64>>,
    hessians: Vec<DMatrix<f64>>,
    conditions: Vec<f64>,
    bounds: Vec<f64>,
}

impl QuadraticEnsemble {
    pub fn new(anchors: Vec<Vec<f64>>, hessians: Vec<DMatrix<f64>>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::EmptyInput("ensemble has no members"));
        }
        check_dims(anchors.len(), hessians.len())?;
        let d = anchors[0].len();
        let mut conditions = Vec::with_capacity(anchors.len());
        let mut bounds = Vec::with_capacity(anchors.len());
        for (p, h) in anchors.iter().zip(&hessians) {
            check_dims(d, p.len())?;
            check_dims(d, h.nrows())?;
            let (lo, hi) = spd_extremes(h)?;
            conditions.push(hi / lo);
            bounds.push((2.0 - 2.0 * lo / hi).max(0.0).sqrt());
        }
        Ok(Self {
            anchors,
            hessians,
            conditions,
            bounds,
        })
    }

    /// Random Hessians with condition numbers at most `c_max` for the given anchors.
    pub fn with_random_hessians(anchors: Vec<Vec<f64>>, c_max: f64, stream: RngStream) -> Result<Self> {
        if !(c_max >= 1.0) {
            return Err(Error::Domain {
                what: "condition number",
                value: c_max,
                domain: "[1, inf)",
            });
        }
        let d = anchors.first().map_or(0, Vec::len);
        let hessians = (0..anchors.len())
            .map(|i| random_spd(d, c_max, &mut stream.child(i as u64).rng()))
            .collect();
        Self::new(anchors, hessians)
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.anchors[0].len()
    }

    pub fn anchors(&self) -> &[Vec<f64>] {
        &self.anchors
    }

    pub fn hessian(&self, i: usize) -> &DMatrix<f64> {
        &self.hessians[i]
    }

    pub fn conditions(&self) -> &[f64] {
        &self.conditions
    }

    /// Alignment bound of member `i`.
    pub fn alignment_bound(&self, i: usize) -> f64 {
        self.bounds[i]
    }

    pub fn loss(&self, i: usize, w: &[f64]) -> Result<f64> {
        let diff = self.diff(i, w)?;
        Ok(0.5 * diff.dot(&(&self.hessians[i] * &diff)))
    }

    fn diff(&self, i: usize, w: &[f64]) -> Result<DVector<f64>> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.len() });
        }
        check_dims(self.dim(), w.len())?;
        Ok(DVector::from_iterator(
            w.len(),
            w.iter().zip(&self.anchors[i]).map(|(a, b)| a - b),
        ))
    }
}

/// `ĝ_i(w) = −H_i (w − p_i)`.
pub fn quadratic_minibatch_gradient(ens: &QuadraticEnsemble, i: usize, w: &[f64]) -> Result<Vec<f64>> {
    let diff = ens.diff(i, w)?;
    Ok((-(&ens.hessians[i] * diff)).as_slice().to_vec())
}

/// `‖(p − w)/‖p − w‖ − ĝ/‖ĝ‖‖`, or `None` when either vector vanishes.
pub fn direction_discrepancy(anchor: &[f64], w: &[f64], g: &[f64]) -> Option<f64> {
    let dir: Vec<f64> = anchor.iter().zip(w).map(|(p, w)| p - w).collect();
    let (nd, ng) = (norm(&dir), norm(g));
    if nd == 0.0 || ng == 0.0 {
        return None;
    }
    let s: f64 = dir
        .iter()
        .zip(g)
        .map(|(a, b)| {
            let e = a / nd - b / ng;
            e * e
        })
        .sum();
    Some(s.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hand_gradient() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0]));
        let ens = QuadraticEnsemble::new(vec![vec![0.0, 0.0]], vec![h]).unwrap();
        assert_eq!(quadratic_minibatch_gradient(&ens, 0, &[1.0, 1.0]).unwrap(), vec![-1.0, -2.0]);
        assert_eq!(quadratic_minibatch_gradient(&ens, 0, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(
            quadratic_minibatch_gradient(&ens, 1, &[0.0, 0.0]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert_relative_eq!(ens.conditions()[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_hessian_points_at_anchor() {
        let ens = QuadraticEnsemble::new(vec![vec![3.0, -1.0, 2.0]], vec![DMatrix::identity(3, 3)]).unwrap();
        let w = [0.5, 0.5, 0.5];
        let g = quadratic_minibatch_gradient(&ens, 0, &w).unwrap();
        assert_eq!(direction_discrepancy(&ens.anchors()[0], &w, &g), Some(0.0));
    }

    #[test]
    fn bounds() {
        assert_eq!(alignment_bound(&(DMatrix::identity(4, 4) * 3.0)).unwrap(), 0.0);
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.1]));
        assert_relative_eq!(alignment_bound(&h).unwrap(), (2.0 - 2.0 / 1.1f64).sqrt(), epsilon = 1e-14);
        assert_relative_eq!(alignment_bound(&h).unwrap(), 0.4264, epsilon = 1e-4);
        let indefinite = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -0.1]));
        assert!(matches!(alignment_bound(&indefinite), Err(Error::NotSpd(_))));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(alignment_bound(&asym), Err(Error::NotSpd(_))));
    }

    #[test]
    fn random_spd_respects_condition_target() {
        let mut rng = RngStream::new(2, 0).rng();
        for _ in 0..10 {
            let h = random_spd(12, 1.1, &mut rng);
            let (lo, hi) = spd_extremes(&h).unwrap();
            assert!(lo >= 1.0 - 1e-10 && hi <= 1.1 + 1e-10);
        }
    }
}
