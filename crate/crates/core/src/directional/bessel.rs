//! Logarithm of the modified Bessel function of the first kind, `ln I_ν(x)`.
//!
//! Moderate orders and arguments use the power series summed in log space
//! outward from its largest term. Otherwise the Debye uniform asymptotic
//! expansion is used; its first omitted term is `O(p⁵/ν⁵)` with
//! `p = ν/√(ν² + x²)`, negligible in either regime.

use statrs::function::gamma::ln_gamma;

/// Orders at or above this use the uniform asymptotic expansion.
pub const DEBYE_MIN_ORDER: f64 = 1000.0;

/// Arguments at or above this use the uniform asymptotic expansion at any positive order.
pub const DEBYE_MIN_ARGUMENT: f64 = 1e5;

/// `ln I_ν(x)` for `ν ≥ 0`, `x ≥ 0`. Returns `-inf` when `I_ν(0) = 0`.
pub fn log_bessel_i(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && x >= 0.0);
    if x == 0.0 {
        return if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if nu >= DEBYE_MIN_ORDER || (nu > 0.0 && x >= DEBYE_MIN_ARGUMENT) {
        log_bessel_i_debye(nu, x)
    } else {
        log_bessel_i_series(nu, x)
    }
}

pub(crate) fn log_bessel_i_series(nu: f64, x: f64) -> f64 {
    let lhalf = (0.5 * x).ln();
    let log_term = |k: f64| (2.0 * k + nu) * lhalf - ln_gamma(k + 1.0) - ln_gamma(k + nu + 1.0);
    // Terms peak where (k + 1)(k + ν + 1) ≈ x²/4.
    let q = 0.25 * x * x;
    let b = nu + 2.0;
    let c = nu + 1.0 - q;
    let k_peak = ((-b + (b * b - 4.0 * c).sqrt()) / 2.0).max(0.0).round();
    let t_peak = log_term(k_peak);
    let two_lhalf = 2.0 * lhalf;

    let mut sum = 1.0;
    let mut t = t_peak;
    let mut k = k_peak;
    loop {
        t += two_lhalf - (k + 1.0).ln() - (k + nu + 1.0).ln();
        k += 1.0;
        let rel = (t - t_peak).exp();
        sum += rel;
        if rel < 1e-18 * sum {
            break;
        }
    }
    let mut t = t_peak;
    let mut k = k_peak;
    while k > 0.0 {
        t -= two_lhalf - k.ln() - (k + nu).ln();
        k -= 1.0;
        let rel = (t - t_peak).exp();
        sum += rel;
        if rel < 1e-18 * sum {
            break;
        }
    }
    t_peak + sum.ln()
}

pub(crate) fn log_bessel_i_debye(nu: f64, x: f64) -> f64 {
    let z = x / nu;
    let s = (1.0 + z * z).sqrt();
    let p = 1.0 / s;
    let eta = s + (z / (1.0 + s)).ln();
    let p2 = p * p;
    let u1 = p * (3.0 - 5.0 * p2) / 24.0;
    let u2 = p2 * (81.0 + p2 * (-462.0 + p2 * 385.0)) / 1152.0;
    let u3 = p * p2 * (30375.0 + p2 * (-369603.0 + p2 * (765765.0 - p2 * 425425.0))) / 414720.0;
    let u4 = p2
        * p2
        * (4465125.0
            + p2 * (-94121676.0 + p2 * (349922430.0 + p2 * (-446185740.0 + p2 * 185910725.0))))
        / 39813120.0;
    let inv = 1.0 / nu;
    let corr = 1.0 + inv * (u1 + inv * (u2 + inv * (u3 + inv * u4)));
    nu * eta - 0.5 * (2.0 * std::f64::consts::PI * nu).ln() - 0.5 * s.ln() + corr.ln()
}
