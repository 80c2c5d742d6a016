//! Centering and unit-scaling of a dataset, with the record needed to map
//! coefficients and data back to the original scale.

use nalgebra::{DMatrix, DVector};

use super::{CoefficientVector, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct StandardizeOptions {
    /// Remove zero-variance columns instead of failing.
    pub drop_constant: bool,
}

/// Everything needed to undo [`standardize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub y_mean: f64,
    /// Column means of the original design, one per original column.
    pub x_means: Vec<f64>,
    /// Root mean square of each centered original column (1 for dropped ones).
    pub x_scales: Vec<f64>,
    /// Original indices of the columns present in the standardized dataset.
    pub kept: Vec<usize>,
    /// Original indices of removed constant columns.
    pub dropped: Vec<usize>,
}

impl Standardization {
    pub fn original_p(&self) -> usize {
        self.x_means.len()
    }

    /// Maps coefficients of the standardized problem to the original columns
    /// and returns them with the implied intercept. Dropped columns get zero.
    pub fn to_original(&self, beta_std: &CoefficientVector) -> (CoefficientVector, f64) {
        let mut beta = DVector::zeros(self.original_p());
        for (k, &j) in self.kept.iter().enumerate() {
            beta[j] = beta_std.get(k) / self.x_scales[j];
        }
        let intercept = self.y_mean
            - beta
                .iter()
                .zip(&self.x_means)
                .map(|(b, m)| b * m)
                .sum::<f64>();
        (CoefficientVector::new(beta), intercept)
    }

    /// Inverse of [`Standardization::to_original`] on the slope part.
    pub fn to_standardized(&self, beta: &CoefficientVector) -> CoefficientVector {
        CoefficientVector::from_vec(
            self.kept
                .iter()
                .map(|&j| beta.get(j) * self.x_scales[j])
                .collect(),
        )
    }

    /// Rebuilds the original dataset from its standardized form.
    pub fn destandardize(&self, ds: &Dataset) -> Result<Dataset> {
        let n = ds.n();
        let p = self.original_p();
        let mut x = DMatrix::zeros(n, p);
        for j in 0..p {
            let std_col = self.kept.iter().position(|&k| k == j);
            for i in 0..n {
                x[(i, j)] = match std_col {
                    Some(k) => ds.x()[(i, k)] * self.x_scales[j] + self.x_means[j],
                    None => self.x_means[j],
                };
            }
        }
        let y = ds.y().add_scalar(self.y_mean);
        Dataset::new(x, y)
    }

    /// True when centering and scaling change nothing beyond `tol`.
    pub fn is_identity(&self, tol: f64) -> bool {
        self.dropped.is_empty()
            && self.y_mean.abs() <= tol
            && self.x_means.iter().all(|m| m.abs() <= tol)
            && self.x_scales.iter().all(|s| (s - 1.0).abs() <= tol)
    }
}

/// Centers `y` and every column of `X`, then scales columns so that
/// `n⁻¹ Σᵢ xᵢⱼ² = 1`.
pub fn standardize(ds: &Dataset, opts: StandardizeOptions) -> Result<(Dataset, Standardization)> {
    let n = ds.n();
    if n < 2 {
        return Err(Error::invalid("standardize needs at least two observations"));
    }
    let nf = n as f64;
    let p = ds.p();
    let mut x_means = Vec::with_capacity(p);
    let mut x_scales = Vec::with_capacity(p);
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for j in 0..p {
        let col = ds.x().column(j);
        let mean = col.sum() / nf;
        let ms = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf;
        let scale = ms.sqrt();
        let magnitude = col.amax().max(1.0);
        x_means.push(mean);
        if scale <= 1e-12 * magnitude {
            if !opts.drop_constant {
                return Err(Error::ZeroVariance { column: j });
            }
            x_scales.push(1.0);
            dropped.push(j);
        } else {
            x_scales.push(scale);
            kept.push(j);
        }
    }
    if kept.is_empty() {
        return Err(Error::invalid("every column is constant"));
    }
    let mut x = DMatrix::zeros(n, kept.len());
    for (k, &j) in kept.iter().enumerate() {
        for i in 0..n {
            x[(i, k)] = (ds.x()[(i, j)] - x_means[j]) / x_scales[j];
        }
    }
    let y_mean = ds.y().sum() / nf;
    let y = ds.y().add_scalar(-y_mean);
    let mut out = Dataset::new(x, y)?;
    if let Some(names) = ds.column_names() {
        out = out.with_names(kept.iter().map(|&j| names[j].clone()).collect())?;
    }
    Ok((
        out,
        Standardization {
            y_mean,
            x_means,
            x_scales,
            kept,
            dropped,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_abs(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).amax()
    }

    fn random_dataset(n: usize, p: usize, cells: &[f64], ys: &[f64]) -> Dataset {
        Dataset::new(
            DMatrix::from_column_slice(n, p, &cells[..n * p]),
            DVector::from_column_slice(&ys[..n]),
        )
        .unwrap()
    }

    #[test]
    fn columns_have_unit_mean_square() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 10.0, 2.0, 20.0, 3.0, 35.0, 4.0, 41.0]);
        let ds = Dataset::new(x, DVector::from_vec(vec![1.0, 2.0, 3.0, 5.0])).unwrap();
        let (std, rec) = standardize(&ds, StandardizeOptions::default()).unwrap();
        for j in 0..2 {
            let col = std.x().column(j);
            assert!(col.sum().abs() < 1e-12);
            assert!((col.norm_squared() / 4.0 - 1.0).abs() < 1e-12);
        }
        assert!(std.y().sum().abs() < 1e-12);
        assert!(!rec.is_identity(1e-9));
    }

    #[test]
    fn standardized_input_is_a_fixed_point() {
        let x = DMatrix::from_row_slice(4, 1, &[1.0, -1.0, 1.0, -1.0]);
        let ds = Dataset::new(x, DVector::from_vec(vec![0.5, -0.5, 1.0, -1.0])).unwrap();
        let (std, rec) = standardize(&ds, StandardizeOptions::default()).unwrap();
        assert!(rec.is_identity(1e-15));
        assert!(max_abs(std.x(), ds.x()) < 1e-15);
    }

    #[test]
    fn constant_column_is_dropped_only_when_allowed() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 7.0, 2.0, 7.0, 4.0, 7.0]);
        let ds = Dataset::new(x, DVector::from_vec(vec![1.0, 0.0, 2.0])).unwrap();
        assert!(matches!(
            standardize(&ds, StandardizeOptions::default()),
            Err(Error::ZeroVariance { column: 1 })
        ));
        let (std, rec) = standardize(&ds, StandardizeOptions { drop_constant: true }).unwrap();
        assert_eq!(std.p(), 1);
        assert_eq!(rec.dropped, vec![1]);
        assert_eq!(rec.kept, vec![0]);
        let back = rec.destandardize(&std).unwrap();
        assert!(max_abs(back.x(), ds.x()) < 1e-12);
    }

    #[test]
    fn single_row_rejected() {
        let ds = Dataset::new(DMatrix::from_element(1, 1, 1.0), DVector::from_element(1, 1.0)).unwrap();
        assert!(standardize(&ds, StandardizeOptions::default()).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_and_idempotence(
            n in 2usize..12,
            p in 1usize..5,
            cells in proptest::collection::vec(-100.0f64..100.0, 60),
            ys in proptest::collection::vec(-100.0f64..100.0, 12),
        ) {
            let ds = random_dataset(n, p, &cells, &ys);
            let Ok((std, rec)) = standardize(&ds, StandardizeOptions::default()) else {
                return Ok(());
            };
            let back = rec.destandardize(&std).unwrap();
            prop_assert!(max_abs(back.x(), ds.x()) <= 1e-12 * 100.0);
            prop_assert!((back.y() - ds.y()).amax() <= 1e-12 * 100.0);

            let (twice, _) = standardize(&std, StandardizeOptions::default()).unwrap();
            prop_assert!(max_abs(twice.x(), std.x()) <= 1e-12);
            prop_assert!((twice.y() - std.y()).amax() <= 1e-12 * 100.0);
        }

        #[test]
        fn back_transform_preserves_fitted_values(
            n in 2usize..12,
            p in 1usize..5,
            cells in proptest::collection::vec(-10.0f64..10.0, 60),
            ys in proptest::collection::vec(-10.0f64..10.0, 12),
            coefs in proptest::collection::vec(-5.0f64..5.0, 5),
        ) {
            let ds = random_dataset(n, p, &cells, &ys);
            let Ok((std, rec)) = standardize(&ds, StandardizeOptions::default()) else {
                return Ok(());
            };
            let beta_std = CoefficientVector::from_vec(coefs[..std.p()].to_vec());
            let fitted_std = std.x() * beta_std.values();
            let (beta, intercept) = rec.to_original(&beta_std);
            let fitted = ds.x() * beta.values();
            for i in 0..n {
                let a = fitted_std[i] + rec.y_mean;
                let b = fitted[i] + intercept;
                prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
            }
            let again = rec.to_standardized(&beta);
            prop_assert!(again.max_abs_diff(&beta_std) <= 1e-12 * 10.0);
        }
    }
}
