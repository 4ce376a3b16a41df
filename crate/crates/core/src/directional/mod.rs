//! Directional statistics on the unit hypersphere: the vMF family, the
//! concentration estimator κ̂ and angle statistics.

pub mod angles;
pub mod bessel;
pub mod kappa;
pub mod resultant;
pub mod sphere;
pub mod vmf;

pub use angles::{angle_degrees, asymptotic_angle_params, empirical_angle_profile, AngleProfile, AngleSummary};
pub use bessel::{log_bessel_i, DEBYE_MIN_ARGUMENT, DEBYE_MIN_ORDER};
pub use kappa::{h, h_derivatives, kappa_hat_from_rbar, lipschitz_constant, HDerivatives, RBAR_CLAMP};
pub use resultant::{
    estimate_mean_direction, resultant_summary, simulate_uniform_kappa_hat, simulate_vmf_resultant,
    streaming_resultant, ResultantSummary, StreamingResultant,
};
pub use sphere::{fill_uniform_sphere, sample_uniform_sphere, sample_uniform_sphere_with};
pub use vmf::{log_normalizer, log_sphere_area, sample_vmf, vmf_log_density, VmfModel, VmfSampler};
