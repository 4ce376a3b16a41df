//! The concentration estimator `κ̂ = r̄(d − r̄²)/(1 − r̄²)` and its derivatives
//! with respect to the resultant norm `u = n r̄`.

use crate::error::{Error, Result};

/// Mean resultant lengths above this are clamped so κ̂ stays finite.
pub const RBAR_CLAMP: f64 = 1.0 - 1e-12;

/// Slack above 1 tolerated in `r̄` before it is rejected as out of domain.
pub const RBAR_SLACK: f64 = 1e-9;

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::Domain {
            what: "dimension",
            value: 0.0,
            domain: "d >= 1",
        });
    }
    Ok(())
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain {
            what: "sample count",
            value: 0.0,
            domain: "n >= 1",
        });
    }
    Ok(())
}

fn check_rbar(r_bar: f64) -> Result<f64> {
    if !(0.0..=1.0 + RBAR_SLACK).contains(&r_bar) {
        return Err(Error::Domain {
            what: "mean resultant length",
            value: r_bar,
            domain: "[0, 1 + 1e-9]",
        });
    }
    Ok(r_bar.min(RBAR_CLAMP))
}

/// `r̄(d − r̄²)/(1 − r̄²)`, with `r̄` clamped to [`RBAR_CLAMP`].
pub fn kappa_hat_from_rbar(r_bar: f64, d: usize) -> Result<f64> {
    check_dim(d)?;
    let r = check_rbar(r_bar)?;
    let r2 = r * r;
    Ok(r * (d as f64 - r2) / (1.0 - r2))
}

/// κ̂ as a function of the resultant norm `u` of `n` unit vectors in `d` dimensions.
pub fn h(u: f64, n: usize, d: usize) -> Result<f64> {
    check_count(n)?;
    let r_bar = u / n as f64;
    if !(0.0..=1.0 + RBAR_SLACK).contains(&r_bar) {
        return Err(Error::Domain {
            what: "resultant norm",
            value: u,
            domain: "[0, n(1 + 1e-9)]",
        });
    }
    kappa_hat_from_rbar(r_bar, d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HDerivatives {
    pub first: f64,
    pub second: f64,
}

/// First and second derivatives of [`h`] in `u`.
///
/// With `r = u/n`:
/// `h'  = (d + (d − 3) r² + r⁴) / (n (1 − r²)²)` and
/// `h'' = 2 (d − 1) r (3 + r²) / (n² (1 − r²)³)`.
/// Both follow from differentiating `(d r − r³)/(1 − r²)` directly; at `d = 1`
/// the estimator is the identity in `r`, so `h''` vanishes there.
pub fn h_derivatives(u: f64, n: usize, d: usize) -> Result<HDerivatives> {
    check_count(n)?;
    check_dim(d)?;
    let nf = n as f64;
    if !(u >= 0.0 && u < nf) {
        return Err(Error::Domain {
            what: "resultant norm",
            value: u,
            domain: "[0, n)",
        });
    }
    let r = u / nf;
    let r2 = r * r;
    let df = d as f64;
    let one_m = 1.0 - r2;
    let first = (df + (df - 3.0) * r2 + r2 * r2) / (one_m * one_m) / nf;
    let second = 2.0 * (df - 1.0) * r * (3.0 + r2) / (one_m * one_m * one_m) / (nf * nf);
    Ok(HDerivatives { first, second })
}

/// Lipschitz constant of `h` on `[0, n(1 − eps)]`; since `h'` is
/// nondecreasing this is `h'(n(1 − eps))`.
pub fn lipschitz_constant(n: usize, d: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain {
            what: "eps",
            value: eps,
            domain: "(0, 1]",
        });
    }
    Ok(h_derivatives(n as f64 * (1.0 - eps), n, d)?.first)
}
