//! Elastic-net augmentation and adaptive column rescaling.
//!
//! Stacking `√λ₂·I` below `X` and zeros below `y` turns the ridge term into
//! extra least-squares rows, so any lasso solver handles the elastic net.
//! Multiplying column `j` by `1/wⱼ` turns the weighted ℓ₁ penalty into a
//! plain one.

use nalgebra::{DMatrix, DVector};

use crate::model::{CoefficientVector, Dataset, ZERO_TOL};

/// `X̃ = [X; √λ₂·I]`, `ỹ = (y, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedProblem {
    pub x_tilde: DMatrix<f64>,
    pub y_tilde: DVector<f64>,
    pub lambda2: f64,
}

impl AugmentedProblem {
    pub fn n_rows(&self) -> usize {
        self.x_tilde.nrows()
    }

    pub fn p(&self) -> usize {
        self.x_tilde.ncols()
    }

    /// `½‖ỹ − X̃β‖²`.
    pub fn half_rss(&self, beta: &DVector<f64>) -> f64 {
        0.5 * (&self.y_tilde - &self.x_tilde * beta).norm_squared()
    }
}

pub fn augment_design(ds: &Dataset, lambda2: f64) -> AugmentedProblem {
    assert!(lambda2 >= 0.0, "lambda2 must be non-negative");
    let (n, p) = (ds.n(), ds.p());
    let mut x_tilde = DMatrix::zeros(n + p, p);
    x_tilde.view_mut((0, 0), (n, p)).copy_from(ds.x());
    let root = lambda2.sqrt();
    for j in 0..p {
        x_tilde[(n + j, j)] = root;
    }
    let mut y_tilde = DVector::zeros(n + p);
    y_tilde.rows_mut(0, n).copy_from(ds.y());
    AugmentedProblem {
        x_tilde,
        y_tilde,
        lambda2,
    }
}

/// `wⱼ = |β̃ⱼ|^(−γ)`, with `wⱼ = +∞` for zero initial coefficients.
///
/// `γ = 0` yields unit weights everywhere, including at zeros.
pub fn adaptive_weights(beta_init: &CoefficientVector, gamma: f64) -> Vec<f64> {
    assert!(gamma >= 0.0, "gamma must be non-negative");
    beta_init
        .as_slice()
        .iter()
        .map(|b| {
            if gamma == 0.0 {
                1.0
            } else if b.abs() <= ZERO_TOL {
                f64::INFINITY
            } else {
                b.abs().powf(-gamma)
            }
        })
        .collect()
}

/// Records which columns survived rescaling and by how much they were scaled.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnScaling {
    p: usize,
    /// Original indices of the retained columns.
    pub kept: Vec<usize>,
    /// Multiplier applied to each retained column (`1/wⱼ`).
    pub factors: Vec<f64>,
}

impl ColumnScaling {
    /// Scaling that turns weights `w` into a plain ℓ₁ penalty; infinite
    /// weights drop the column.
    pub fn from_weights(weights: &[f64]) -> Self {
        let mut kept = Vec::new();
        let mut factors = Vec::new();
        for (j, &w) in weights.iter().enumerate() {
            if w.is_finite() {
                kept.push(j);
                factors.push(1.0 / w);
            }
        }
        ColumnScaling {
            p: weights.len(),
            kept,
            factors,
        }
    }

    pub fn original_p(&self) -> usize {
        self.p
    }

    pub fn is_identity(&self) -> bool {
        self.kept.len() == self.p && self.factors.iter().all(|&f| f == 1.0)
    }

    /// `βⱼ = θⱼ · factorⱼ` on retained columns, zero elsewhere.
    pub fn to_original(&self, theta: &[f64]) -> CoefficientVector {
        let mut beta = DVector::zeros(self.p);
        for ((&j, &f), &t) in self.kept.iter().zip(&self.factors).zip(theta) {
            beta[j] = t * f;
        }
        CoefficientVector::new(beta)
    }
}

/// Multiplies column `j` of the augmented design by `|β̃ⱼ|^γ`; columns with
/// `β̃ⱼ = 0` are removed.
pub fn rescale_columns(
    prob: &AugmentedProblem,
    beta_init: &CoefficientVector,
    gamma: f64,
) -> (AugmentedProblem, ColumnScaling) {
    let scaling = ColumnScaling::from_weights(&adaptive_weights(beta_init, gamma));
    let mut x = prob.x_tilde.select_columns(&scaling.kept);
    for (k, &f) in scaling.factors.iter().enumerate() {
        x.column_mut(k).scale_mut(f);
    }
    (
        AugmentedProblem {
            x_tilde: x,
            y_tilde: prob.y_tilde.clone(),
            lambda2: prob.lambda2,
        },
        scaling,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_dataset;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_lambda2_has_zero_bottom_block() {
        let ds = random_dataset(5, 3, 1);
        let aug = augment_design(&ds, 0.0);
        assert_eq!(aug.n_rows(), 8);
        assert!(aug.x_tilde.rows(5, 3).iter().all(|&v| v == 0.0));
        assert_eq!(aug.x_tilde.rows(0, 5), ds.x().clone());
    }

    #[test]
    fn bottom_block_is_root_lambda2_identity() {
        let ds = random_dataset(5, 2, 2);
        let aug = augment_design(&ds, 4.0);
        let block = aug.x_tilde.rows(5, 2).into_owned();
        assert_eq!(block, DMatrix::identity(2, 2) * 2.0);
        assert!(aug.y_tilde.rows(5, 2).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn augmented_quadratic_matches_ridge_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let ds = random_dataset(5, 3, 100 + trial);
            let lambda2 = rng.random_range(0.0..10.0);
            let beta = DVector::from_fn(3, |_, _| rng.random_range(-3.0..3.0));
            let aug = augment_design(&ds, lambda2);
            let direct = 0.5 * (ds.y() - ds.x() * &beta).norm_squared()
                + 0.5 * lambda2 * beta.norm_squared();
            assert!((aug.half_rss(&beta) - direct).abs() <= 1e-10);
        }
    }

    #[test]
    fn weights_follow_negative_power() {
        let b = CoefficientVector::from_vec(vec![2.0, 0.5, 0.0]);
        assert_eq!(adaptive_weights(&b, 0.0), vec![1.0, 1.0, 1.0]);
        let w = adaptive_weights(&b, 1.0);
        assert_eq!(&w[..2], &[0.5, 2.0]);
        assert!(w[2].is_infinite());
    }

    #[test]
    fn gamma_zero_rescaling_is_identity() {
        let ds = random_dataset(6, 3, 3);
        let aug = augment_design(&ds, 1.0);
        let init = CoefficientVector::from_vec(vec![0.3, -2.0, 5.0]);
        let (scaled, rec) = rescale_columns(&aug, &init, 0.0);
        assert!(rec.is_identity());
        assert_eq!(scaled, aug);
    }

    #[test]
    fn zero_initial_coefficient_drops_column() {
        let ds = random_dataset(6, 3, 4);
        let aug = augment_design(&ds, 0.0);
        let init = CoefficientVector::from_vec(vec![0.5, 0.0, -2.0]);
        let (scaled, rec) = rescale_columns(&aug, &init, 1.0);
        assert_eq!(rec.kept, vec![0, 2]);
        assert_eq!(scaled.p(), 2);
        assert!((scaled.x_tilde.column(1) - aug.x_tilde.column(2) * 2.0).amax() < 1e-15);
        let beta = rec.to_original(&[1.0, 1.0]);
        assert_eq!(beta.as_slice(), &[0.5, 0.0, 2.0]);
    }
}
