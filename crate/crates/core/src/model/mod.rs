//! Shared data model: datasets, coefficient vectors, supports, penalty
//! settings, fit results and the loss measures used by the benchmarks.

mod coef;
mod dataset;
mod fit;
mod standardize;

pub use coef::{l1_loss, l2_loss, CoefficientVector, SupportSet, ZERO_TOL};
pub use dataset::Dataset;
pub use fit::{FitResult, MethodTag, PenaltySpec};
pub use standardize::{standardize, StandardizeOptions, Standardization};
