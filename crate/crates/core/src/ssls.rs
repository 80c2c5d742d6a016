//! SSLS: choose a support with a penalized selector, then refit the selected
//! coordinates by ordinary least squares.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::qr_least_squares;
use crate::model::{CoefficientVector, Dataset, FitResult, MethodTag, PenaltySpec, SupportSet};
use crate::solvers::{fit_with_moments, penalized_path, select_k_with_coefficients, LarsOptions, Moments};

/// Penalized method used in the selection stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selector {
    AdaptiveElasticNet,
    AdaptiveLasso,
    Lasso,
    ElasticNet,
}

impl Selector {
    pub fn method_tag(self) -> MethodTag {
        match self {
            Selector::AdaptiveElasticNet => MethodTag::AdaptiveElasticNet,
            Selector::AdaptiveLasso => MethodTag::AdaptiveLasso,
            Selector::Lasso => MethodTag::Lasso,
            Selector::ElasticNet => MethodTag::ElasticNet,
        }
    }

    pub fn is_adaptive(self) -> bool {
        matches!(self, Selector::AdaptiveElasticNet | Selector::AdaptiveLasso)
    }

    pub fn uses_ridge(self) -> bool {
        matches!(self, Selector::AdaptiveElasticNet | Selector::ElasticNet)
    }

    pub fn as_str(self) -> &'static str {
        self.method_tag().as_str()
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<MethodTag>()? {
            MethodTag::AdaptiveElasticNet => Ok(Selector::AdaptiveElasticNet),
            MethodTag::AdaptiveLasso => Ok(Selector::AdaptiveLasso),
            MethodTag::Lasso => Ok(Selector::Lasso),
            MethodTag::ElasticNet => Ok(Selector::ElasticNet),
            other => Err(Error::invalid(format!("{other} cannot be used as a selector"))),
        }
    }
}

/// Selection-stage configuration. With `k_target` set the support is read off
/// the path at that size and `penalty.lambda1` is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct SslsConfig {
    pub selector: Selector,
    pub penalty: PenaltySpec,
    pub k_target: Option<usize>,
}

impl SslsConfig {
    /// Builds the penalty for `selector`; `beta_init` supplies the adaptive
    /// weights and is ignored by the non-adaptive selectors.
    pub fn new(
        selector: Selector,
        lambda1: f64,
        lambda2: f64,
        gamma: f64,
        beta_init: &CoefficientVector,
    ) -> Result<Self> {
        let lambda2 = if selector.uses_ridge() { lambda2 } else { 0.0 };
        let penalty = if selector.is_adaptive() {
            PenaltySpec::adaptive(lambda1, lambda2, gamma, beta_init)?
        } else {
            PenaltySpec::unweighted(lambda1, lambda2, beta_init.len())?
        };
        Ok(SslsConfig {
            selector,
            penalty,
            k_target: None,
        })
    }

    pub fn with_k_target(mut self, k: usize) -> Self {
        self.k_target = Some(k);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.penalty.validate()?;
        if !self.selector.uses_ridge() && self.penalty.lambda2 != 0.0 {
            return Err(Error::invalid(format!("{} requires lambda2 = 0", self.selector)));
        }
        if !self.selector.is_adaptive() && self.penalty.weights.iter().any(|&w| w != 1.0) {
            return Err(Error::invalid(format!("{} requires unit weights", self.selector)));
        }
        if self.k_target == Some(0) {
            return Err(Error::invalid("k_target must be at least 1"));
        }
        Ok(())
    }
}

/// Both stages of an SSLS fit.
#[derive(Debug, Clone, PartialEq)]
pub struct SslsFit {
    /// Selector coefficients at the chosen λ₁ (or the path breakpoint used
    /// for a fixed budget).
    pub selection: CoefficientVector,
    pub refit: FitResult,
}

/// OLS on the columns in `support`, zero elsewhere.
///
/// `objective` is `½‖y − Xβ‖²` and `kkt_max_violation` is `max |X_S'(y − Xβ)|`.
pub fn ols_refit(ds: &Dataset, support: &SupportSet) -> Result<FitResult> {
    if support.indices().iter().any(|&j| j >= ds.p()) {
        return Err(Error::invalid(format!("support {support} out of range for p = {}", ds.p())));
    }
    if support.len() > ds.n() {
        return Err(Error::SupportTooLarge {
            size: support.len(),
            n: ds.n(),
        });
    }
    let xs = ds.x().select_columns(support.indices());
    let coef = qr_least_squares(&xs, ds.y()).map_err(|positions| Error::DependentColumns {
        dependent: positions.iter().map(|&k| support.indices()[k]).collect(),
    })?;
    let beta = CoefficientVector::scatter(ds.p(), support, coef.as_slice());
    let resid = ds.y() - ds.x() * beta.values();
    let orth = if support.is_empty() { 0.0 } else { xs.tr_mul(&resid).amax() };
    Ok(FitResult {
        support: support.clone(),
        objective: 0.5 * resid.norm_squared(),
        kkt_max_violation: orth,
        method: MethodTag::Ols,
        beta,
    })
}

/// Runs the selector and refits its support by least squares.
pub fn fit_ssls(ds: &Dataset, cfg: &SslsConfig) -> Result<FitResult> {
    fit_ssls_with_moments(ds, &Moments::new(ds), cfg).map(|f| f.refit)
}

pub fn fit_ssls_with_moments(ds: &Dataset, moments: &Moments, cfg: &SslsConfig) -> Result<SslsFit> {
    cfg.validate()?;
    if cfg.penalty.p() != ds.p() {
        return Err(Error::DimensionMismatch {
            expected: ds.p(),
            found: cfg.penalty.p(),
        });
    }
    let (support, selection) = match cfg.k_target {
        Some(k) => {
            if k > ds.n() {
                return Err(Error::SupportTooLarge { size: k, n: ds.n() });
            }
            let opts = LarsOptions {
                max_support: Some(k),
                ..LarsOptions::full(ds.p(), ds.n())
            };
            let path = penalized_path(moments, cfg.penalty.lambda2, &cfg.penalty.weights, &opts)?;
            select_k_with_coefficients(&path, k)?
        }
        None => {
            let fit = fit_with_moments(ds, moments, &cfg.penalty)?;
            (fit.support, fit.beta)
        }
    };
    let mut refit = ols_refit(ds, &support)?;
    refit.method = MethodTag::Ssls;
    Ok(SslsFit { selection, refit })
}
