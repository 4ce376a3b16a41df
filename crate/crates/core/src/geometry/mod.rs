//! Mechanics of the κ̂ decrease: resultant geometry around anchors, the
//! perturbation tolerance, and SGD on quadratic minibatch ensembles.

pub mod anchors;
pub mod quadratic;
pub mod sgd;

pub use anchors::{
    analytic_fprime0, f_of_eps, perturbed_decrease_check, resultant_norm, theorem3_xi_threshold, AnchorSet,
    DecreaseCheck,
};
pub use quadratic::{
    alignment_bound, direction_discrepancy, quadratic_minibatch_gradient, random_spd, spd_extremes,
    QuadraticEnsemble,
};
pub use sgd::{displacement_capped_lr, run_sgd_epochs, EpochRecord, SgdManifest, SgdTrace};
