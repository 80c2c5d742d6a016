//! LARS with the lasso modification, computing the whole piecewise-linear
//! solution path of `½‖ỹ − Zθ‖² + λ‖θ‖₁` from the Gram matrix `Z'Z` and
//! correlations `Z'ỹ`.
//!
//! Between breakpoints the active coefficients move along
//! `(Z_A'Z_A)⁻¹ s_A` while every active correlation shrinks at unit rate.
//! A breakpoint occurs when an inactive correlation catches up with λ
//! (variable enters) or an active coefficient crosses zero (variable leaves).

use nalgebra::{DMatrix, DVector};

use super::augment::ColumnScaling;
use super::moments::Moments;
use crate::error::{Error, Result};
use crate::linalg::GrowingCholesky;
use crate::model::{CoefficientVector, Dataset, SupportSet};

/// Ties in correlation or step length closer than this (relative to the
/// starting λ) are resolved together, lower index first.
const TIE_RTOL: f64 = 1e-12;
/// Remaining λ (relative to λ_max) below which the path is treated as
/// finished; correlations that small are rounding noise.
const STOP_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoint {
    pub lambda1: f64,
    pub beta: CoefficientVector,
    pub support: SupportSet,
}

/// Breakpoints of a lasso-type path, `lambda1` strictly decreasing, first
/// breakpoint the all-zero solution.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizationPath {
    pub breakpoints: Vec<Breakpoint>,
    /// Set when `max_steps` ran out before the path finished.
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct LarsOptions {
    pub max_steps: usize,
    /// Stop once λ reaches this value; the final breakpoint sits exactly on it.
    pub lambda_min: f64,
    /// Stop at the first breakpoint whose support has at least this many entries.
    pub max_support: Option<usize>,
}

impl LarsOptions {
    pub fn full(p: usize, n: usize) -> Self {
        LarsOptions {
            max_steps: default_max_steps(p, n),
            lambda_min: 0.0,
            max_support: None,
        }
    }
}

pub(crate) fn default_max_steps(p: usize, n: usize) -> usize {
    8 * p.max(n) + 16
}

impl RegularizationPath {
    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn p(&self) -> usize {
        self.breakpoints[0].beta.len()
    }

    pub fn last(&self) -> &Breakpoint {
        self.breakpoints.last().expect("path has at least one breakpoint")
    }

    /// Largest support size seen along the path.
    pub fn max_support_size(&self) -> usize {
        self.breakpoints.iter().map(|b| b.support.len()).max().unwrap_or(0)
    }

    /// Solution at an arbitrary `lambda1`, by linear interpolation between the
    /// enclosing breakpoints.
    pub fn solution_at(&self, lambda1: f64) -> Result<CoefficientVector> {
        let first = &self.breakpoints[0];
        if lambda1 >= first.lambda1 {
            return Ok(CoefficientVector::zeros(first.beta.len()));
        }
        for pair in self.breakpoints.windows(2) {
            let (hi, lo) = (&pair[0], &pair[1]);
            if lambda1 >= lo.lambda1 {
                if lambda1 == lo.lambda1 {
                    return Ok(lo.beta.clone());
                }
                let frac = (hi.lambda1 - lambda1) / (hi.lambda1 - lo.lambda1);
                let beta = hi.beta.values() + (lo.beta.values() - hi.beta.values()) * frac;
                return Ok(CoefficientVector::new(beta));
            }
        }
        Err(Error::PathTruncated {
            requested: lambda1,
            reached: self.last().lambda1,
        })
    }
}

/// Weighted-ℓ₁ lasso path (`λ₂ = 0`) of a dataset.
pub fn lars_path(ds: &Dataset, weights: &[f64], max_steps: usize) -> Result<RegularizationPath> {
    if max_steps == 0 {
        return Err(Error::invalid("max_steps must be at least 1"));
    }
    let opts = LarsOptions {
        max_steps,
        ..LarsOptions::full(ds.p(), ds.n())
    };
    penalized_path(&Moments::new(ds), 0.0, weights, &opts)
}

/// Path of `½‖y − Xβ‖² + ½λ₂‖β‖² + λ₁ Σ wⱼ|βⱼ|` over λ₁, computed on the
/// augmented, column-rescaled problem and mapped back to `β`.
pub fn penalized_path(
    moments: &Moments,
    lambda2: f64,
    weights: &[f64],
    opts: &LarsOptions,
) -> Result<RegularizationPath> {
    if weights.len() != moments.p() {
        return Err(Error::DimensionMismatch {
            expected: moments.p(),
            found: weights.len(),
        });
    }
    if !(lambda2 >= 0.0) {
        return Err(Error::invalid(format!("lambda2 must be >= 0, got {lambda2}")));
    }
    let scaling = ColumnScaling::from_weights(weights);
    let (gram, xty) = moments.scaled(lambda2, &scaling);
    // without a ridge term at most n columns can be active at once
    let saturation = (lambda2 == 0.0).then_some(moments.n);
    let raw = lars_gram(&gram, &xty, opts, saturation)?;
    let breakpoints = raw
        .steps
        .into_iter()
        .map(|(lambda1, theta)| {
            let beta = scaling.to_original(theta.as_slice());
            let support = beta.support();
            Breakpoint {
                lambda1,
                beta,
                support,
            }
        })
        .collect();
    Ok(RegularizationPath {
        breakpoints,
        truncated: raw.truncated,
    })
}

pub(crate) struct RawPath {
    pub steps: Vec<(f64, DVector<f64>)>,
    pub truncated: bool,
}

struct Active {
    idx: Vec<usize>,
    signs: Vec<f64>,
    chol: GrowingCholesky,
}

impl Active {
    fn push(&mut self, gram: &DMatrix<f64>, j: usize, sign: f64) -> bool {
        let cross: Vec<f64> = self.idx.iter().map(|&i| gram[(i, j)]).collect();
        if !self.chol.push(&cross, gram[(j, j)]) {
            return false;
        }
        self.idx.push(j);
        self.signs.push(sign);
        true
    }

    fn remove(&mut self, gram: &DMatrix<f64>, drop: &[usize]) -> bool {
        let keep: Vec<(usize, f64)> = self
            .idx
            .iter()
            .zip(&self.signs)
            .filter(|(j, _)| !drop.contains(j))
            .map(|(&j, &s)| (j, s))
            .collect();
        self.idx.clear();
        self.signs.clear();
        self.chol = GrowingCholesky::empty();
        keep.into_iter().all(|(j, s)| self.push(gram, j, s))
    }
}

/// Core LARS-lasso iteration. `gram` is `Z'Z`, `xty` is `Z'ỹ`.
///
/// With `saturation = Some(n)` (the rank of `Z`), no variable is admitted
/// while `n` are active: the active columns then span the response space and
/// every inactive correlation stays a fixed fraction of λ.
pub(crate) fn lars_gram(
    gram: &DMatrix<f64>,
    xty: &DVector<f64>,
    opts: &LarsOptions,
    saturation: Option<usize>,
) -> Result<RawPath> {
    let p = xty.len();
    let mut beta = DVector::<f64>::zeros(p);
    let lambda0 = xty.amax();
    let mut steps = vec![(lambda0, beta.clone())];
    if p == 0 || lambda0 <= opts.lambda_min || lambda0 == 0.0 {
        return Ok(RawPath {
            steps,
            truncated: false,
        });
    }
    let tie = TIE_RTOL * lambda0;
    let mut lambda = lambda0;
    let mut active = Active {
        idx: Vec::new(),
        signs: Vec::new(),
        chol: GrowingCholesky::empty(),
    };
    let mut is_active = vec![false; p];
    let mut just_dropped: Vec<usize> = Vec::new();
    let mut corr = xty.clone();

    // initial entry: every column tied with the maximum, lowest index first
    for j in 0..p {
        if corr[j].abs() >= lambda - tie {
            if !active.push(gram, j, corr[j].signum()) {
                return Err(Error::RankDeficient {
                    step: 0,
                    active: active.idx.clone(),
                });
            }
            is_active[j] = true;
        }
    }

    let mut step = 0;
    loop {
        step += 1;
        if step > opts.max_steps {
            return Ok(RawPath {
                steps,
                truncated: true,
            });
        }
        let s_a = DVector::from_column_slice(&active.signs);
        let d_a = active.chol.solve(&s_a);
        // a = G[:, A] d_A: rate at which each correlation decreases
        let mut a = DVector::<f64>::zeros(p);
        for (k, &j) in active.idx.iter().enumerate() {
            a.axpy(d_a[k], &gram.column(j), 1.0);
        }

        let mut t_best = lambda - opts.lambda_min;
        let floor = tie.max(f64::MIN_POSITIVE);

        let saturated = saturation.is_some_and(|n| active.idx.len() >= n);
        let mut enter_t = vec![f64::INFINITY; p];
        for j in 0..p {
            if is_active[j] || saturated {
                continue;
            }
            // a variable that just left sits on its old boundary; it may only
            // come back through the opposite one
            let left_from = if just_dropped.contains(&j) { corr[j].signum() } else { 0.0 };
            let mut t = f64::INFINITY;
            let up = 1.0 - a[j];
            if up > 1e-15 && left_from <= 0.0 {
                t = t.min((lambda - corr[j]) / up);
            }
            let down = 1.0 + a[j];
            if down > 1e-15 && left_from >= 0.0 {
                t = t.min((lambda + corr[j]) / down);
            }
            if t > floor {
                enter_t[j] = t;
                t_best = t_best.min(t);
            }
        }
        let mut drop_t = vec![f64::INFINITY; active.idx.len()];
        for (k, &j) in active.idx.iter().enumerate() {
            if d_a[k] != 0.0 {
                let t = -beta[j] / d_a[k];
                if t > floor {
                    drop_t[k] = t;
                    t_best = t_best.min(t);
                }
            }
        }

        let t = t_best;
        for (k, &j) in active.idx.iter().enumerate() {
            beta[j] += t * d_a[k];
        }
        let reached_min = t >= lambda - opts.lambda_min - floor.max(STOP_RTOL * lambda0);
        lambda = if reached_min { opts.lambda_min } else { lambda - t };

        let dropping: Vec<usize> = active
            .idx
            .iter()
            .zip(&drop_t)
            .filter(|(_, &dt)| dt <= t + tie)
            .map(|(&j, _)| j)
            .collect();
        for &j in &dropping {
            beta[j] = 0.0;
        }
        corr = xty - gram * &beta;

        if !reached_min {
            if !dropping.is_empty() {
                for &j in &dropping {
                    is_active[j] = false;
                }
                if !active.remove(gram, &dropping) {
                    return Err(Error::RankDeficient {
                        step,
                        active: active.idx.clone(),
                    });
                }
            }
            let full = saturation.is_some_and(|n| active.idx.len() >= n);
            let mut entering: Vec<usize> = (0..p)
                .filter(|&j| {
                    enter_t[j] <= t + tie
                        || (!full
                            && !is_active[j]
                            && !just_dropped.contains(&j)
                            && !dropping.contains(&j)
                            && corr[j].abs() >= lambda - tie)
                })
                .filter(|&j| !is_active[j])
                .collect();
            entering.sort_unstable();
            entering.dedup();
            for &j in &entering {
                if saturation.is_some_and(|n| active.idx.len() >= n) {
                    break;
                }
                if !active.push(gram, j, corr[j].signum()) {
                    let mut idx = active.idx.clone();
                    idx.push(j);
                    return Err(Error::RankDeficient { step, active: idx });
                }
                is_active[j] = true;
            }
            just_dropped = dropping;
        }

        steps.push((lambda, beta.clone()));

        if reached_min || lambda <= 0.0 {
            break;
        }
        if let Some(limit) = opts.max_support {
            let size = beta.iter().filter(|v| v.abs() > crate::model::ZERO_TOL).count();
            if size >= limit {
                break;
            }
        }
    }
    Ok(RawPath {
        steps,
        truncated: false,
    })
}
