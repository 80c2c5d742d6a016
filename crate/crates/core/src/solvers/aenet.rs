use nalgebra::DVector;

use super::augment::adaptive_weights;
use super::lars::{default_max_steps, penalized_path, LarsOptions};
use super::moments::Moments;
use crate::error::{Error, Result};
use crate::model::{CoefficientVector, Dataset, FitResult, MethodTag, PenaltySpec};

impl PenaltySpec {
    /// Adaptive penalty with weights `|β̃ⱼ|^(−γ)` from an initial estimate.
    pub fn adaptive(lambda1: f64, lambda2: f64, gamma: f64, beta_init: &CoefficientVector) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(Error::invalid(format!("gamma must be >= 0, got {gamma}")));
        }
        PenaltySpec::new(lambda1, lambda2, gamma, adaptive_weights(beta_init, gamma))
    }

    /// Method name implied by the weights and ridge term.
    pub fn method_tag(&self) -> MethodTag {
        let unit = self.weights.iter().all(|&w| w == 1.0);
        match (unit, self.lambda2 > 0.0) {
            (true, false) => MethodTag::Lasso,
            (true, true) => MethodTag::ElasticNet,
            (false, false) => MethodTag::AdaptiveLasso,
            (false, true) => MethodTag::AdaptiveElasticNet,
        }
    }
}

/// `½‖y − Xβ‖² + ½λ₂‖β‖² + λ₁ Σ wⱼ|βⱼ|`.
pub fn objective(ds: &Dataset, spec: &PenaltySpec, beta: &CoefficientVector) -> f64 {
    let resid = ds.y() - ds.x() * beta.values();
    let l1: f64 = beta
        .as_slice()
        .iter()
        .zip(&spec.weights)
        .filter(|(b, _)| **b != 0.0)
        .map(|(b, w)| w * b.abs())
        .sum();
    0.5 * resid.norm_squared() + 0.5 * spec.lambda2 * beta.values().norm_squared() + spec.lambda1 * l1
}

/// `g = X'(y − Xβ) − λ₂β`, the negative gradient of the smooth part.
pub(crate) fn smooth_gradient(ds: &Dataset, lambda2: f64, beta: &DVector<f64>) -> DVector<f64> {
    let resid = ds.y() - ds.x() * beta;
    ds.x().tr_mul(&resid) - beta * lambda2
}

/// Largest violation of the optimality conditions: `| |gⱼ|/wⱼ − λ₁ |` on the
/// support and `max(0, |gⱼ|/wⱼ − λ₁)` off it.
pub fn kkt_check(ds: &Dataset, spec: &PenaltySpec, beta: &CoefficientVector) -> f64 {
    let g = smooth_gradient(ds, spec.lambda2, beta.values());
    let support = beta.support();
    let mut worst: f64 = 0.0;
    for j in 0..ds.p() {
        let w = spec.weights[j];
        let on = support.contains(j);
        let v = if w.is_infinite() {
            if on {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            let ratio = g[j].abs() / w;
            if on {
                (ratio - spec.lambda1).abs()
            } else {
                (ratio - spec.lambda1).max(0.0)
            }
        };
        worst = worst.max(v);
    }
    worst
}

/// The adaptive elastic net minimizer, via augmentation, column rescaling and
/// LARS down to `spec.lambda1`.
pub fn fit_adaptive_elastic_net(ds: &Dataset, spec: &PenaltySpec) -> Result<FitResult> {
    fit_with_moments(ds, &Moments::new(ds), spec)
}

/// Same as [`fit_adaptive_elastic_net`] with precomputed cross products.
pub fn fit_with_moments(ds: &Dataset, moments: &Moments, spec: &PenaltySpec) -> Result<FitResult> {
    spec.validate()?;
    if spec.p() != ds.p() {
        return Err(Error::DimensionMismatch {
            expected: ds.p(),
            found: spec.p(),
        });
    }
    let opts = LarsOptions {
        max_steps: default_max_steps(ds.p(), ds.n()),
        lambda_min: spec.lambda1,
        max_support: None,
    };
    let path = penalized_path(moments, spec.lambda2, &spec.weights, &opts)?;
    if path.truncated {
        return Err(Error::PathTruncated {
            requested: spec.lambda1,
            reached: path.last().lambda1,
        });
    }
    let beta = path.solution_at(spec.lambda1)?;
    Ok(finish(ds, spec, beta))
}

pub(crate) fn finish(ds: &Dataset, spec: &PenaltySpec, beta: CoefficientVector) -> FitResult {
    FitResult {
        support: beta.support(),
        objective: objective(ds, spec, &beta),
        kkt_max_violation: kkt_check(ds, spec, &beta),
        method: spec.method_tag(),
        beta,
    }
}
