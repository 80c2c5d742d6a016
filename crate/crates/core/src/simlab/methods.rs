//! The five estimators compared in simulations, all driven by the same
//! weighted elastic-net solver.

use crate::error::{Error, Result};
use crate::model::{CoefficientVector, Dataset, MethodTag, PenaltySpec};
use crate::solvers::{fit_with_moments, initial_estimator_with_moments, Moments, NoiseLevel};
use crate::ssls::ols_refit;

/// Noise level substituted for `σ = 0` so that tuning rules stay positive.
const SIGMA_FLOOR: f64 = 1e-6;

/// Source of the adaptive weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialRule {
    /// Lasso at `4σ√(log p / n)` with the design's σ.
    Lasso,
    /// Marginal regression `X'y / n`.
    Marginal,
}

/// Tuning shared by every method of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Tuning {
    pub gamma: f64,
    /// Candidate ridge penalties; the one with the smallest in-sample
    /// residual sum of squares is kept.
    pub lambda2_grid: Vec<f64>,
    /// Multiplier on the universal penalty `σ√(2 n log p)` for the
    /// unweighted methods.
    pub lambda1_scale: f64,
    /// Same multiplier for the adaptive methods, whose weights already
    /// inflate the penalty on weak coordinates.
    pub adaptive_lambda1_scale: f64,
    pub initial: InitialRule,
}

impl Default for Tuning {
    fn default() -> Self {
        Tuning {
            gamma: 1.0,
            lambda2_grid: vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0],
            lambda1_scale: 1.0,
            adaptive_lambda1_scale: 0.5,
            initial: InitialRule::Lasso,
        }
    }
}

impl Tuning {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if self.lambda2_grid.is_empty() || self.lambda2_grid.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
            return Err(Error::invalid("lambda2 grid must be non-empty with entries >= 0"));
        }
        for scale in [self.lambda1_scale, self.adaptive_lambda1_scale] {
            if !(scale >= 0.0 && scale.is_finite()) {
                return Err(Error::invalid("lambda1 scales must be finite and >= 0"));
            }
        }
        Ok(())
    }

    /// Universal penalty `σ √(2 n log p)` for the ½-scaled objective.
    pub fn universal_lambda1(n: usize, p: usize, sigma: f64) -> f64 {
        let p = (p.max(2)) as f64;
        effective_sigma(sigma) * (2.0 * n as f64 * p.ln()).sqrt()
    }

    pub fn lambda1(&self, n: usize, p: usize, sigma: f64) -> f64 {
        self.lambda1_scale * Tuning::universal_lambda1(n, p, sigma)
    }

    pub fn adaptive_lambda1(&self, n: usize, p: usize, sigma: f64) -> f64 {
        self.adaptive_lambda1_scale * Tuning::universal_lambda1(n, p, sigma)
    }
}

pub(crate) fn effective_sigma(sigma: f64) -> f64 {
    sigma.max(SIGMA_FLOOR)
}

/// Coefficient estimates of one replication, keyed by method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodFits {
    pub fits: Vec<(MethodTag, CoefficientVector)>,
}

impl MethodFits {
    pub fn get(&self, method: MethodTag) -> Option<&CoefficientVector> {
        self.fits.iter().find(|(m, _)| *m == method).map(|(_, b)| b)
    }
}

pub(crate) fn initial_estimate(ds: &Dataset, moments: &Moments, sigma: f64, rule: InitialRule) -> Result<CoefficientVector> {
    match rule {
        InitialRule::Lasso => initial_estimator_with_moments(ds, moments, NoiseLevel::Known(effective_sigma(sigma))),
        InitialRule::Marginal => Ok(CoefficientVector::new(&moments.xty / ds.n() as f64)),
    }
}

fn rss(ds: &Dataset, beta: &CoefficientVector) -> f64 {
    (ds.y() - ds.x() * beta.values()).norm_squared()
}

/// Best fit over the λ₂ grid (smallest RSS, first wins on ties).
fn over_grid(ds: &Dataset, moments: &Moments, base: &PenaltySpec, grid: &[f64]) -> Result<CoefficientVector> {
    let mut best: Option<(f64, CoefficientVector)> = None;
    for &lambda2 in grid {
        let spec = PenaltySpec {
            lambda2,
            ..base.clone()
        };
        let beta = fit_with_moments(ds, moments, &spec)?.beta;
        let r = rss(ds, &beta);
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            best = Some((r, beta));
        }
    }
    Ok(best.expect("grid is non-empty").1)
}

/// Fits the requested methods on one dataset. SSLS refits the adaptive
/// elastic net support.
pub fn fit_methods(ds: &Dataset, sigma: f64, tuning: &Tuning, methods: &[MethodTag]) -> Result<MethodFits> {
    tuning.validate()?;
    let moments = Moments::new(ds);
    let (n, p) = (ds.n(), ds.p());
    let lambda1 = tuning.lambda1(n, p, sigma);
    let unit = PenaltySpec::unweighted(lambda1, 0.0, p)?;
    let needs_adaptive = methods
        .iter()
        .any(|m| matches!(m, MethodTag::AdaptiveLasso | MethodTag::AdaptiveElasticNet | MethodTag::Ssls));
    let adaptive = if needs_adaptive {
        let init = initial_estimate(ds, &moments, sigma, tuning.initial)?;
        let lambda1 = tuning.adaptive_lambda1(n, p, sigma);
        Some(PenaltySpec::adaptive(lambda1, 0.0, tuning.gamma, &init)?)
    } else {
        None
    };
    let mut aen: Option<CoefficientVector> = None;
    let mut fits = Vec::with_capacity(methods.len());
    for &method in methods {
        let beta = match method {
            MethodTag::Lasso => fit_with_moments(ds, &moments, &unit)?.beta,
            MethodTag::ElasticNet => over_grid(ds, &moments, &unit, &tuning.lambda2_grid)?,
            MethodTag::AdaptiveLasso => fit_with_moments(ds, &moments, adaptive.as_ref().expect("adaptive spec"))?.beta,
            MethodTag::AdaptiveElasticNet | MethodTag::Ssls => {
                if aen.is_none() {
                    let spec = adaptive.as_ref().expect("adaptive spec");
                    aen = Some(over_grid(ds, &moments, spec, &tuning.lambda2_grid)?);
                }
                let sel = aen.as_ref().expect("just fitted");
                if method == MethodTag::Ssls {
                    ols_refit(ds, &sel.support())?.beta
                } else {
                    sel.clone()
                }
            }
            MethodTag::Ols => ols_refit(ds, &crate::model::SupportSet::new((0..p).collect(), p)?)?.beta,
        };
        fits.push((method, beta));
    }
    Ok(MethodFits { fits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simlab::{generate, Covariance, SimDesign};

    #[test]
    fn noiseless_strong_signal_recovered_by_ssls() {
        let d = SimDesign::with_leading(100, 10, &[9.0, 6.0], 0.0, Covariance::Identity, 4).unwrap();
        let (ds, beta) = generate(&d).unwrap();
        let fits = fit_methods(&ds, 0.0, &Tuning::default(), &MethodTag::ALL[..5]).unwrap();
        let ssls = fits.get(MethodTag::Ssls).unwrap();
        assert!(crate::model::l2_loss(ssls, &beta).unwrap() <= 1e-8);
        assert_eq!(fits.fits.len(), 5);
    }

    #[test]
    fn universal_penalty_scales_with_sigma() {
        let t = Tuning::default();
        assert!((t.lambda1(100, 10, 2.0) - 2.0 * t.lambda1(100, 10, 1.0)).abs() < 1e-12);
        assert!(t.lambda1(100, 10, 0.0) > 0.0);
    }
}
