//! Solution paths on a design that violates the irrepresentable condition:
//! the adaptive elastic net with marginal-regression weights against the
//! plain lasso.

use rayon::prelude::*;

use super::design::{generate_replication, SimDesign};
use crate::error::{Error, Result};
use crate::model::{CoefficientVector, Dataset};
use crate::solvers::{adaptive_weights, penalized_path, LarsOptions, Moments, RegularizationPath};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSettings {
    pub lambda2: f64,
    pub gamma: f64,
}

impl Default for PathSettings {
    fn default() -> Self {
        PathSettings {
            lambda2: 1000.0,
            gamma: 1.0,
        }
    }
}

/// Adaptive elastic net path (weights from `X'y/n`) and lasso path of one dataset.
pub fn contrast_paths(ds: &Dataset, settings: PathSettings) -> Result<(RegularizationPath, RegularizationPath)> {
    let moments = Moments::new(ds);
    let init = CoefficientVector::new(&moments.xty / ds.n() as f64);
    let weights = adaptive_weights(&init, settings.gamma);
    let opts = LarsOptions::full(ds.p(), ds.n());
    let aen = penalized_path(&moments, settings.lambda2, &weights, &opts)?;
    let lasso = penalized_path(&moments, 0.0, &vec![1.0; ds.p()], &opts)?;
    Ok((aen, lasso))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastReport {
    pub replications: usize,
    /// Per replication: whether each path has a breakpoint with exactly the
    /// true support. `None` marks a failed replication.
    pub hits: Vec<Option<(bool, bool)>>,
}

impl ContrastReport {
    fn rate(&self, pick: impl Fn(&(bool, bool)) -> bool) -> f64 {
        let done: Vec<&(bool, bool)> = self.hits.iter().flatten().collect();
        done.iter().filter(|h| pick(h)).count() as f64 / done.len().max(1) as f64
    }

    pub fn aen_rate(&self) -> f64 {
        self.rate(|h| h.0)
    }

    pub fn lasso_rate(&self) -> f64 {
        self.rate(|h| h.1)
    }

    pub fn failed(&self) -> usize {
        self.hits.iter().filter(|h| h.is_none()).count()
    }
}

/// Repeats [`contrast_paths`] over replications and records which paths pass
/// through the true support.
pub fn path_contrast(design: &SimDesign, replications: usize, settings: PathSettings) -> Result<ContrastReport> {
    design.validate()?;
    if replications == 0 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    let truth = design.true_support();
    let hits = (0..replications)
        .into_par_iter()
        .map(|r| {
            let (ds, _) = generate_replication(design, r as u64).ok()?;
            let (aen, lasso) = contrast_paths(&ds, settings).ok()?;
            let has = |path: &RegularizationPath| path.breakpoints.iter().any(|b| b.support == truth);
            Some((has(&aen), has(&lasso)))
        })
        .collect();
    Ok(ContrastReport { replications, hits })
}

/// Path in long form `(step, lambda1, coefficient, value)` for plotting.
pub fn write_path_csv<W: std::io::Write>(path: &RegularizationPath, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "lambda1", "coefficient", "value"])?;
    for (step, bp) in path.breakpoints.iter().enumerate() {
        for (j, v) in bp.beta.as_slice().iter().enumerate() {
            if *v != 0.0 || step == 0 {
                w.write_record([step.to_string(), bp.lambda1.to_string(), j.to_string(), v.to_string()])?;
            }
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
