use std::fmt;
use std::str::FromStr;

use super::{CoefficientVector, SupportSet};
use crate::error::{Error, Result};

/// Tuning of the penalized objective
/// `½‖y − Xβ‖² + ½λ₂‖β‖² + λ₁ Σⱼ wⱼ|βⱼ|`.
///
/// A weight of `+∞` excludes the coordinate from the fit.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySpec {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gamma: f64,
    pub weights: Vec<f64>,
}

impl PenaltySpec {
    pub fn new(lambda1: f64, lambda2: f64, gamma: f64, weights: Vec<f64>) -> Result<Self> {
        let spec = PenaltySpec {
            lambda1,
            lambda2,
            gamma,
            weights,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Unit weights: plain lasso (`lambda2 = 0`) or elastic net.
    pub fn unweighted(lambda1: f64, lambda2: f64, p: usize) -> Result<Self> {
        PenaltySpec::new(lambda1, lambda2, 0.0, vec![1.0; p])
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("gamma", self.gamma),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if let Some((j, w)) = self
            .weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w > 0.0) || w.is_nan())
        {
            return Err(Error::invalid(format!("weight {j} must be > 0, got {w}")));
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.weights.len()
    }

    pub fn with_lambda1(&self, lambda1: f64) -> PenaltySpec {
        PenaltySpec {
            lambda1,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodTag {
    Lasso,
    ElasticNet,
    AdaptiveLasso,
    AdaptiveElasticNet,
    Ssls,
    Ols,
}

impl MethodTag {
    pub const ALL: [MethodTag; 6] = [
        MethodTag::Lasso,
        MethodTag::ElasticNet,
        MethodTag::AdaptiveLasso,
        MethodTag::AdaptiveElasticNet,
        MethodTag::Ssls,
        MethodTag::Ols,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::Lasso => "lasso",
            MethodTag::ElasticNet => "elastic_net",
            MethodTag::AdaptiveLasso => "adaptive_lasso",
            MethodTag::AdaptiveElasticNet => "adaptive_elastic_net",
            MethodTag::Ssls => "ssls",
            MethodTag::Ols => "ols",
        }
    }

    /// Label used in the human-readable benchmark table.
    pub fn display_name(self) -> &'static str {
        match self {
            MethodTag::Lasso => "Lasso",
            MethodTag::ElasticNet => "Elastic Net",
            MethodTag::AdaptiveLasso => "Adaptive lasso",
            MethodTag::AdaptiveElasticNet => "AEN",
            MethodTag::Ssls => "SSLS",
            MethodTag::Ols => "OLS",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodTag::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method {s:?}")))
    }
}

/// Output of any estimator in the crate.
///
/// `objective` is the penalized objective for the penalized methods and
/// `½‖y − Xβ‖²` for least-squares refits. `kkt_max_violation` is the
/// optimality residual of the corresponding problem.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub beta: CoefficientVector,
    pub support: SupportSet,
    pub objective: f64,
    pub kkt_max_violation: f64,
    pub method: MethodTag,
}
