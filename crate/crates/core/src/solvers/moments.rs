use nalgebra::{DMatrix, DVector};

use super::augment::{AugmentedProblem, ColumnScaling};
use crate::model::Dataset;

/// Cross products `X'X`, `X'y` of a dataset.
///
/// Every solver in this module only touches the data through these, so one
/// `Moments` can back many fits (different penalties, weights, λ₂) on the
/// same dataset without re-reading `X`.
#[derive(Debug, Clone)]
pub struct Moments {
    pub xtx: DMatrix<f64>,
    pub xty: DVector<f64>,
    pub n: usize,
}

impl Moments {
    pub fn new(ds: &Dataset) -> Self {
        let xt = ds.x().transpose();
        Moments {
            xtx: &xt * ds.x(),
            xty: &xt * ds.y(),
            n: ds.n(),
        }
    }

    pub fn from_augmented(prob: &AugmentedProblem) -> Self {
        let xt = prob.x_tilde.transpose();
        Moments {
            xtx: &xt * &prob.x_tilde,
            xty: &xt * &prob.y_tilde,
            n: prob.n_rows(),
        }
    }

    pub fn p(&self) -> usize {
        self.xty.len()
    }

    /// Gram matrix and correlations of the augmented, rescaled lasso problem:
    /// `Z = X̃ · diag(factors)` restricted to `scaling.kept`.
    pub(crate) fn scaled(&self, lambda2: f64, scaling: &ColumnScaling) -> (DMatrix<f64>, DVector<f64>) {
        let k = scaling.kept.len();
        let f = &scaling.factors;
        let mut gram = DMatrix::zeros(k, k);
        for (b, &jb) in scaling.kept.iter().enumerate() {
            for (a, &ja) in scaling.kept.iter().enumerate() {
                let mut g = self.xtx[(ja, jb)];
                if ja == jb {
                    g += lambda2;
                }
                gram[(a, b)] = g * f[a] * f[b];
            }
        }
        let xty = DVector::from_iterator(
            k,
            scaling.kept.iter().zip(f).map(|(&j, &fj)| self.xty[j] * fj),
        );
        (gram, xty)
    }
}
