//! Monte-Carlo diagnostics: selection accuracy against n, bias and MSE decay,
//! and the distribution of the standardized SSLS estimate.

use nalgebra::DVector;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use super::benchmark::Summary;
use super::design::{generate_replication, SimDesign};
use super::methods::{fit_methods, Tuning};
use crate::error::{Error, Result};
use crate::linalg::{solve_spd, sym_sqrt};
use crate::model::{CoefficientVector, MethodTag};
use crate::rng::child_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyPoint {
    pub n: usize,
    pub accuracy: f64,
    /// Binomial standard error `√(a(1 − a)/R)`.
    pub se: f64,
    pub completed: usize,
    pub failed: usize,
}

fn check_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return Err(Error::invalid("n grid must be non-empty, positive and strictly increasing"));
    }
    Ok(())
}

/// The design at sample size `n`, with its own seed so that grid points are
/// independent of each other.
fn at_n(base: &SimDesign, n: usize) -> SimDesign {
    base.with_n(n).with_seed(child_seed(base.seed, n as u64))
}

/// Fraction of replications in which `method` recovers the true support.
pub fn consistency_curve(
    base: &SimDesign,
    n_grid: &[usize],
    replications: usize,
    tuning: &Tuning,
    method: MethodTag,
) -> Result<Vec<AccuracyPoint>> {
    check_grid(n_grid)?;
    if replications == 0 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    n_grid
        .iter()
        .map(|&n| {
            let design = at_n(base, n);
            let truth = design.true_support();
            let hits: Vec<Option<bool>> = (0..replications)
                .into_par_iter()
                .map(|r| {
                    let (ds, _) = generate_replication(&design, r as u64).ok()?;
                    let fits = fit_methods(&ds, design.sigma, tuning, &[method]).ok()?;
                    Some(fits.fits[0].1.support() == truth)
                })
                .collect();
            let done: Vec<bool> = hits.iter().flatten().copied().collect();
            let k = done.len();
            let accuracy = if k == 0 {
                f64::NAN
            } else {
                done.iter().filter(|&&h| h).count() as f64 / k as f64
            };
            Ok(AccuracyPoint {
                n,
                accuracy,
                se: (accuracy * (1.0 - accuracy) / k.max(1) as f64).sqrt(),
                completed: k,
                failed: replications - k,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayPoint {
    pub n: usize,
    /// `‖mean(β̂) − β‖²` over replications.
    pub aen_bias2: f64,
    /// Mean of `‖β̂ − β‖²`.
    pub aen_mse: f64,
    pub ssls_bias2: f64,
    pub ssls_mse: f64,
    /// Standard error of `ssls_mse`.
    pub ssls_mse_se: f64,
    /// Mean over draws of `σ² tr((X_S'X_S)⁻¹)`.
    pub oracle_mse: f64,
    pub accuracy: f64,
    pub completed: usize,
    pub failed: usize,
}

struct DecayDraw {
    aen: CoefficientVector,
    ssls: CoefficientVector,
    oracle: f64,
    hit: bool,
}

/// Empirical bias² and MSE of the adaptive elastic net and SSLS along `n_grid`.
pub fn error_decay(base: &SimDesign, n_grid: &[usize], replications: usize, tuning: &Tuning) -> Result<Vec<DecayPoint>> {
    check_grid(n_grid)?;
    if replications < 2 {
        return Err(Error::invalid("error_decay needs at least 2 replications"));
    }
    let truth = base.true_support();
    n_grid
        .iter()
        .map(|&n| {
            let design = at_n(base, n);
            let draws: Vec<Option<DecayDraw>> = (0..replications)
                .into_par_iter()
                .map(|r| {
                    let (ds, _) = generate_replication(&design, r as u64).ok()?;
                    let fits = fit_methods(
                        &ds,
                        design.sigma,
                        tuning,
                        &[MethodTag::AdaptiveElasticNet, MethodTag::Ssls],
                    )
                    .ok()?;
                    let xs = ds.x().select_columns(truth.indices());
                    let inv_trace = solve_trace_inverse(&xs.tr_mul(&xs))?;
                    let ssls = fits.fits[1].1.clone();
                    Some(DecayDraw {
                        hit: ssls.support() == truth,
                        aen: fits.fits[0].1.clone(),
                        ssls,
                        oracle: design.sigma * design.sigma * inv_trace,
                    })
                })
                .collect();
            let ok: Vec<&DecayDraw> = draws.iter().flatten().collect();
            if ok.is_empty() {
                return Err(Error::invalid(format!("every replication failed at n = {n}")));
            }
            let beta = base.beta_true.values();
            let (aen_bias2, aen_mse, _) = bias_and_mse(ok.iter().map(|d| d.aen.values()), beta);
            let (ssls_bias2, ssls_mse, ssls_mse_se) = bias_and_mse(ok.iter().map(|d| d.ssls.values()), beta);
            let oracle: Vec<f64> = ok.iter().map(|d| d.oracle).collect();
            let hits = ok.iter().filter(|d| d.hit).count();
            Ok(DecayPoint {
                n,
                aen_bias2,
                aen_mse,
                ssls_bias2,
                ssls_mse,
                ssls_mse_se,
                oracle_mse: Summary::of(&oracle).mean,
                accuracy: hits as f64 / ok.len() as f64,
                completed: ok.len(),
                failed: replications - ok.len(),
            })
        })
        .collect()
}

fn solve_trace_inverse(a: &nalgebra::DMatrix<f64>) -> Option<f64> {
    let q = a.nrows();
    let mut t = 0.0;
    for j in 0..q {
        let mut e = DVector::zeros(q);
        e[j] = 1.0;
        t += solve_spd(a, &e)?[j];
    }
    Some(t)
}

fn bias_and_mse<'a>(estimates: impl Iterator<Item = &'a DVector<f64>> + Clone, beta: &DVector<f64>) -> (f64, f64, f64) {
    let k = estimates.clone().count() as f64;
    let mut mean = DVector::zeros(beta.len());
    for e in estimates.clone() {
        mean += e;
    }
    mean /= k;
    let sq: Vec<f64> = estimates.map(|e| (e - beta).norm_squared()).collect();
    let s = Summary::of(&sq);
    ((mean - beta).norm_squared(), s.mean, s.se)
}

/// Estimator whose standardized error is examined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalityTarget {
    Ssls,
    AdaptiveElasticNet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalityReport {
    /// `Tᵣ = α'(X_S'X_S)^{1/2}(β̂_S − β_S)/σ` over draws with `Ŝ = S`, in
    /// replication order.
    pub sample: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    /// Kolmogorov–Smirnov distance to N(0, 1).
    pub ks: f64,
    pub replications: usize,
}

impl NormalityReport {
    pub fn retained(&self) -> usize {
        self.sample.len()
    }

    /// Acceptance band `1.63/√R′` for the KS distance.
    pub fn ks_band(&self) -> f64 {
        1.63 / (self.retained() as f64).sqrt()
    }
}

/// Distribution of the standardized estimation error of the true-support
/// coefficients, restricted to draws that select exactly the true support.
pub fn normality_diag(
    design: &SimDesign,
    replications: usize,
    alpha: &[f64],
    tuning: &Tuning,
    target: NormalityTarget,
) -> Result<NormalityReport> {
    let truth = design.true_support();
    if alpha.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: alpha.len(),
        });
    }
    let norm = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("alpha must have unit norm, got {norm}")));
    }
    if !(design.sigma > 0.0) {
        return Err(Error::invalid("normality diagnostic needs sigma > 0"));
    }
    if replications == 0 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    let method = match target {
        NormalityTarget::Ssls => MethodTag::Ssls,
        NormalityTarget::AdaptiveElasticNet => MethodTag::AdaptiveElasticNet,
    };
    let alpha = DVector::from_column_slice(alpha);
    let stats: Vec<Option<f64>> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let (ds, beta) = generate_replication(design, r as u64).ok()?;
            let fit = fit_methods(&ds, design.sigma, tuning, &[method]).ok()?;
            let est = &fit.fits[0].1;
            if est.support() != truth {
                return None;
            }
            let xs = ds.x().select_columns(truth.indices());
            let root = sym_sqrt(&xs.tr_mul(&xs));
            let err = DVector::from_iterator(truth.len(), truth.iter().map(|&j| est.get(j) - beta.get(j)));
            Some(alpha.dot(&(root * err)) / design.sigma)
        })
        .collect();
    let sample: Vec<f64> = stats.into_iter().flatten().collect();
    if 2 * sample.len() < replications {
        return Err(Error::invalid(format!(
            "only {} of {replications} draws selected the true support",
            sample.len()
        )));
    }
    let s = Summary::of(&sample);
    let k = sample.len() as f64;
    let variance = if sample.len() > 1 {
        sample.iter().map(|v| (v - s.mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Ok(NormalityReport {
        ks: ks_statistic(&sample),
        mean: s.mean,
        variance,
        sample,
        replications,
    })
}

/// `sup |F̂(x) − Φ(x)|`.
pub fn ks_statistic(sample: &[f64]) -> f64 {
    let std = Normal::standard();
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = std.cdf(x);
            (f - i as f64 / k).max((i + 1) as f64 / k - f)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simlab::Covariance;

    #[test]
    fn noiseless_accuracy_is_one() {
        let d = SimDesign::with_leading(50, 20, &[9.0, 6.0], 0.0, Covariance::Identity, 3).unwrap();
        let curve = consistency_curve(&d, &[30, 60], 5, &Tuning::default(), MethodTag::AdaptiveElasticNet).unwrap();
        assert!(curve.iter().all(|p| p.accuracy == 1.0 && p.failed == 0));
    }

    #[test]
    fn noiseless_decay_is_zero() {
        let d = SimDesign::with_leading(50, 10, &[9.0, 6.0], 0.0, Covariance::Identity, 3).unwrap();
        let pts = error_decay(&d, &[40, 80], 4, &Tuning::default()).unwrap();
        for p in pts {
            assert!(p.ssls_mse < 1e-16 && p.ssls_bias2 < 1e-16 && p.oracle_mse == 0.0);
        }
    }

    #[test]
    fn grid_must_increase() {
        let d = SimDesign::with_leading(50, 10, &[1.0], 1.0, Covariance::Identity, 3).unwrap();
        assert!(consistency_curve(&d, &[100, 50], 2, &Tuning::default(), MethodTag::Lasso).is_err());
    }

    #[test]
    fn ks_of_quantiles_is_small() {
        let std = Normal::standard();
        let k = 1000;
        let sample: Vec<f64> = (0..k).map(|i| std.inverse_cdf((i as f64 + 0.5) / k as f64)).collect();
        assert!((ks_statistic(&sample) - 0.5 / k as f64).abs() < 1e-9);
    }

    #[test]
    fn alpha_must_be_unit() {
        let d = SimDesign::with_leading(50, 10, &[9.0, 6.0], 1.0, Covariance::Identity, 3).unwrap();
        assert!(normality_diag(&d, 10, &[1.0, 1.0], &Tuning::default(), NormalityTarget::Ssls).is_err());
    }
}
