//! Penalized least-squares solvers.
//!
//! The adaptive elastic net is solved by reducing it to a plain lasso:
//! augment the design with `√λ₂·I` ([`augment_design`]), rescale columns by
//! the inverse weights ([`rescale_columns`]), trace the LARS path
//! ([`penalized_path`]) and map the coefficients back.
//! [`brute_force_fit`] solves the same problem by sign enumeration and serves
//! as an independent reference.

mod aenet;
mod augment;
mod brute;
mod initial;
mod lars;
mod moments;
mod select;

pub use aenet::{fit_adaptive_elastic_net, fit_with_moments, kkt_check, objective};
pub use augment::{adaptive_weights, augment_design, rescale_columns, AugmentedProblem, ColumnScaling};
pub use brute::{brute_force_fit, BRUTE_FORCE_MAX_P};
pub use initial::{estimate_sigma, initial_estimator, initial_estimator_with_moments, NoiseLevel};
pub use lars::{lars_path, penalized_path, Breakpoint, LarsOptions, RegularizationPath};
pub use moments::Moments;
pub use select::{select_k, select_k_with_coefficients};
