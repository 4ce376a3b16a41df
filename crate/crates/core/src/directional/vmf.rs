//! The von Mises-Fisher distribution on `S^{d-1}`.

use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::bessel::log_bessel_i;
use super::sphere::fill_uniform_sphere;
use crate::error::{Error, Result};
use crate::linalg::{check_dims, dot, norm_sq, UnitVector};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VmfModel {
    mu: UnitVector,
    kappa: f64,
}

impl VmfModel {
    pub fn new(mu: UnitVector, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::Domain {
                what: "kappa",
                value: kappa,
                domain: "[0, inf)",
            });
        }
        Ok(Self { mu, kappa })
    }

    pub fn mu(&self) -> &UnitVector {
        &self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    /// `ln C_d(κ)`, the log normalizing constant w.r.t. surface measure.
    pub fn log_normalizer(&self) -> f64 {
        log_normalizer(self.dim(), self.kappa)
    }

    pub fn log_density(&self, x: &UnitVector) -> Result<f64> {
        check_dims(self.dim(), x.dim())?;
        Ok(self.kappa * dot(self.mu.as_slice(), x.as_slice()) + self.log_normalizer())
    }
}

/// Log surface area of `S^{d-1}`: `ln(2 π^{d/2} / Γ(d/2))`.
pub fn log_sphere_area(d: usize) -> f64 {
    let h = 0.5 * d as f64;
    std::f64::consts::LN_2 + h * std::f64::consts::PI.ln() - ln_gamma(h)
}

/// `ln C_d(κ) = (d/2 − 1) ln κ − (d/2) ln 2π − ln I_{d/2−1}(κ)`; at `κ = 0`
/// the uniform density `−ln |S^{d-1}|`.
pub fn log_normalizer(d: usize, kappa: f64) -> f64 {
    if kappa == 0.0 {
        return -log_sphere_area(d);
    }
    let nu = 0.5 * d as f64 - 1.0;
    nu * kappa.ln() - 0.5 * d as f64 * (2.0 * std::f64::consts::PI).ln() - log_bessel_i(nu, kappa)
}

pub fn vmf_log_density(x: &UnitVector, model: &VmfModel) -> Result<f64> {
    model.log_density(x)
}

/// Wood's rejection sampler with precomputed envelope constants.
#[derive(Debug, Clone)]
pub struct VmfSampler {
    model: VmfModel,
    envelope: Option<Envelope>,
    /// Householder vector `e1 − μ`, or `None` when μ is already `e1`.
    householder: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
struct Envelope {
    b: f64,
    x0: f64,
    c: f64,
    beta: Beta<f64>,
}

impl VmfSampler {
    pub fn new(model: VmfModel) -> Result<Self> {
        let d = model.dim();
        if d < 2 {
            return Err(Error::Domain {
                what: "dimension",
                value: d as f64,
                domain: "d >= 2",
            });
        }
        let envelope = if model.kappa > 0.0 {
            let k = model.kappa;
            let dm1 = (d - 1) as f64;
            let b = dm1 / (2.0 * k + (4.0 * k * k + dm1 * dm1).sqrt());
            let x0 = (1.0 - b) / (1.0 + b);
            // 1 − x0² = (1 + x0)(1 − x0) with 1 − x0 = 2b/(1 + b).
            let one_m_x0_sq = (1.0 + x0) * 2.0 * b / (1.0 + b);
            let c = k * x0 + dm1 * one_m_x0_sq.ln();
            let beta = Beta::new(0.5 * dm1, 0.5 * dm1).map_err(|e| Error::InvalidInput(e.to_string()))?;
            Some(Envelope { b, x0, c, beta })
        } else {
            None
        };
        let mut v = model.mu.as_slice().to_vec();
        for x in v.iter_mut() {
            *x = -*x;
        }
        v[0] += 1.0;
        let householder = if norm_sq(&v) > 1e-30 { Some(v) } else { None };
        Ok(Self {
            model,
            envelope,
            householder,
        })
    }

    pub fn model(&self) -> &VmfModel {
        &self.model
    }

    /// Draws the axial component `w = ⟨x, μ⟩` and returns `(w, 1 − w²)`.
    fn sample_axial<R: Rng + ?Sized>(&self, env: &Envelope, rng: &mut R) -> (f64, f64) {
        let k = self.model.kappa;
        let dm1 = (self.model.dim() - 1) as f64;
        loop {
            let z = env.beta.sample(rng);
            let denom = 1.0 - (1.0 - env.b) * z;
            let w = (1.0 - (1.0 + env.b) * z) / denom;
            let u: f64 = rng.random();
            if k * w + dm1 * (-env.x0 * w).ln_1p() - env.c >= u.ln() {
                // 1 − w = 2bz/denom, 1 + w = 2(1 − z)/denom.
                let one_m_w2 = 4.0 * env.b * z * (1.0 - z) / (denom * denom);
                return (w, one_m_w2);
            }
        }
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> UnitVector {
        let d = self.model.dim();
        let mut x = vec![0.0; d];
        let Some(env) = &self.envelope else {
            fill_uniform_sphere(&mut x, rng);
            return UnitVector::from_normalized(x);
        };
        let (w, one_m_w2) = self.sample_axial(env, rng);
        // Uniform tangent direction orthogonal to e1.
        let tangent = &mut x[1..];
        loop {
            for t in tangent.iter_mut() {
                *t = rng.sample(StandardNormal);
            }
            let n2 = norm_sq(tangent);
            if n2 > 1e-24 {
                let s = (one_m_w2.max(0.0) / n2).sqrt();
                for t in tangent.iter_mut() {
                    *t *= s;
                }
                break;
            }
        }
        x[0] = w;
        if let Some(v) = &self.householder {
            // Reflection (I − 2vvᵀ/‖v‖²) maps e1 onto μ.
            let f = 2.0 * dot(v, &x) / norm_sq(v);
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi -= f * vi;
            }
        }
        UnitVector::from_normalized(x)
    }

    pub fn sample(&self, stream: RngStream) -> UnitVector {
        self.sample_with(&mut stream.rng())
    }
}

/// One vMF draw determined by `stream`. `κ = 0` reduces to the uniform sampler.
pub fn sample_vmf(model: &VmfModel, stream: RngStream) -> Result<UnitVector> {
    Ok(VmfSampler::new(model.clone())?.sample(stream))
}
