//! Uniform sampling on `S^{d-1}` by normalizing standard normal vectors.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{norm, UnitVector, ZERO_NORM_THRESHOLD};
use crate::rng::RngStream;

/// Overwrites `buf` with a uniform unit vector. Returns the norm of the
/// Gaussian draw before normalization.
pub fn fill_uniform_sphere<R: Rng + ?Sized>(buf: &mut [f64], rng: &mut R) -> f64 {
    loop {
        for x in buf.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let n = norm(buf);
        // The zero event has probability zero; resample rather than fail.
        if n > ZERO_NORM_THRESHOLD && n.is_finite() {
            for x in buf.iter_mut() {
                *x /= n;
            }
            return n;
        }
    }
}

pub fn sample_uniform_sphere_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<UnitVector> {
    if d == 0 {
        return Err(Error::Domain {
            what: "dimension",
            value: 0.0,
            domain: "d >= 1",
        });
    }
    let mut buf = vec![0.0; d];
    fill_uniform_sphere(&mut buf, rng);
    Ok(UnitVector::from_normalized(buf))
}

/// One uniform draw, fully determined by `stream`.
pub fn sample_uniform_sphere(d: usize, stream: RngStream) -> Result<UnitVector> {
    sample_uniform_sphere_with(d, &mut stream.rng())
}
