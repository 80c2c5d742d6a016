//! Exhaustive reference solver.
//!
//! For every sign pattern `s ∈ {−1, 0, +1}^p` the optimality conditions fix
//! the nonzero block in closed form,
//! `β_A = (X_A'X_A + λ₂I)⁻¹ (X_A'y − λ₁ w_A ∘ s_A)`.
//! The pattern is kept when the solved signs agree with `s` and the
//! off-pattern gradient bound `|gⱼ| ≤ λ₁wⱼ` holds.

use nalgebra::{DMatrix, DVector};

use super::aenet::{finish, objective, smooth_gradient};
use super::moments::Moments;
use crate::error::{Error, Result};
use crate::linalg::GrowingCholesky;
use crate::model::{CoefficientVector, Dataset, FitResult, PenaltySpec};

pub const BRUTE_FORCE_MAX_P: usize = 12;

pub fn brute_force_fit(ds: &Dataset, spec: &PenaltySpec) -> Result<FitResult> {
    let p = ds.p();
    if p > BRUTE_FORCE_MAX_P {
        return Err(Error::TooManyPredictors { p });
    }
    spec.validate()?;
    if spec.p() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: spec.p(),
        });
    }
    let moments = Moments::new(ds);
    let kkt_slack = 1e-9 * (1.0 + moments.xty.amax());

    let mut best: Option<(f64, CoefficientVector)> = None;
    let mut best_any: Option<(f64, CoefficientVector)> = None;
    for mask in 0u32..(1 << p) {
        let active: Vec<usize> = (0..p).filter(|&j| mask & (1 << j) != 0).collect();
        if active.iter().any(|&j| spec.weights[j].is_infinite()) {
            continue;
        }
        let k = active.len();
        let mut m = DMatrix::zeros(k, k);
        for (a, &ja) in active.iter().enumerate() {
            for (b, &jb) in active.iter().enumerate() {
                m[(a, b)] = moments.xtx[(ja, jb)];
            }
            m[(a, a)] += spec.lambda2;
        }
        let Some(chol) = GrowingCholesky::factor(&m) else {
            continue;
        };
        for signs in 0u32..(1 << k) {
            let s: Vec<f64> = (0..k)
                .map(|a| if signs & (1 << a) != 0 { -1.0 } else { 1.0 })
                .collect();
            let rhs = DVector::from_iterator(
                k,
                active
                    .iter()
                    .zip(&s)
                    .map(|(&j, &sj)| moments.xty[j] - spec.lambda1 * spec.weights[j] * sj),
            );
            let sol = chol.solve(&rhs);
            if (0..k).any(|a| !(sol[a] * s[a] > 0.0)) {
                continue;
            }
            let mut beta = DVector::zeros(p);
            for (a, &j) in active.iter().enumerate() {
                beta[j] = sol[a];
            }
            let beta = CoefficientVector::new(beta);
            let obj = objective(ds, spec, &beta);
            let g = smooth_gradient(ds, spec.lambda2, beta.values());
            let kkt_ok = (0..p)
                .filter(|j| mask & (1 << j) == 0)
                .all(|j| g[j].abs() <= spec.lambda1 * spec.weights[j] + kkt_slack);
            let slot = if kkt_ok { &mut best } else { &mut best_any };
            if slot.as_ref().is_none_or(|(o, _)| obj < *o) {
                *slot = Some((obj, beta));
            }
        }
    }
    // every candidate is feasible, so the smallest objective is still the
    // minimizer if rounding rejected the true pattern's gradient check
    let (_, beta) = best
        .or(best_any)
        .ok_or_else(|| Error::invalid("no sign pattern yields a solvable system"))?;
    Ok(finish(ds, spec, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_dataset;

    #[test]
    fn huge_penalty_selects_nothing() {
        let ds = random_dataset(10, 4, 21);
        let lambda1 = 10.0 * ds.x().tr_mul(ds.y()).amax();
        let spec = PenaltySpec::unweighted(lambda1, 0.5, 4).unwrap();
        let fit = brute_force_fit(&ds, &spec).unwrap();
        assert!(fit.support.is_empty());
    }

    #[test]
    fn scalar_closed_form() {
        let ds = random_dataset(9, 1, 22);
        let x = ds.x().column(0);
        let (xty, xtx) = (x.dot(ds.y()), x.norm_squared());
        let spec = PenaltySpec::new(0.5 * xty.abs(), 1.0, 1.0, vec![1.0]).unwrap();
        let fit = brute_force_fit(&ds, &spec).unwrap();
        let expected = (xty - spec.lambda1 * xty.signum()) / (xtx + 1.0);
        assert!((fit.beta.get(0) - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_wide_problems() {
        let ds = random_dataset(20, 13, 23);
        let spec = PenaltySpec::unweighted(1.0, 0.0, 13).unwrap();
        assert!(matches!(
            brute_force_fit(&ds, &spec),
            Err(Error::TooManyPredictors { p: 13 })
        ));
    }
}
