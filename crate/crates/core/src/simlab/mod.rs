//! Simulation lab: seeded data generators, the five-method benchmark and
//! Monte-Carlo diagnostics for selection, estimation error and normality.
//!
//! Simulated data are fitted as generated (no centering or scaling), so the
//! generating model is exactly the intercept-free model being estimated.
//! Every loop over replications runs on the rayon pool and collects in
//! replication order, which keeps reports bit-identical for any thread count.

mod benchmark;
mod design;
mod diagnostics;
mod figure;
mod ic;
mod methods;

pub use benchmark::{run_benchmark, BenchmarkReport, BenchmarkRow, Summary, BENCHMARK_METHODS};
pub use design::{generate, generate_replication, Covariance, SimDesign};
pub use diagnostics::{
    consistency_curve, error_decay, ks_statistic, normality_diag, AccuracyPoint, DecayPoint, NormalityReport,
    NormalityTarget,
};
pub use figure::{contrast_paths, path_contrast, write_path_csv, ContrastReport, PathSettings};
pub use ic::{ic_check, ic_check_population};
pub use methods::{fit_methods, InitialRule, MethodFits, Tuning};
