//! Sparse regression with the adaptive elastic net and the two-stage SSLS
//! estimator (penalized selection followed by a least-squares refit), plus a
//! Monte-Carlo simulation lab and an index-tracking backtester.
//!
//! The model is the intercept-free linear regression `y = Xβ + ε`; centering
//! via [`model::standardize`] absorbs an intercept when one is needed.

pub mod error;
mod linalg;
pub mod model;
pub mod rng;
pub mod solvers;
pub mod simlab;
pub mod ssls;
pub mod tracking;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
