use std::fmt;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Coefficients with magnitude at or below this are treated as exact zeros
/// when extracting a support.
pub const ZERO_TOL: f64 = 1e-12;

/// A coefficient vector over the `p` predictors of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector(DVector<f64>);

impl CoefficientVector {
    pub fn new(values: DVector<f64>) -> Self {
        CoefficientVector(values)
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        CoefficientVector(DVector::from_vec(values))
    }

    pub fn zeros(p: usize) -> Self {
        CoefficientVector(DVector::zeros(p))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }

    /// Indices whose magnitude exceeds [`ZERO_TOL`].
    pub fn support(&self) -> SupportSet {
        SupportSet(
            self.0
                .iter()
                .enumerate()
                .filter(|(_, v)| v.abs() > ZERO_TOL)
                .map(|(j, _)| j)
                .collect(),
        )
    }

    /// Scatter `values` into a length-`p` vector at positions `support`.
    pub fn scatter(p: usize, support: &SupportSet, values: &[f64]) -> Self {
        let mut out = DVector::zeros(p);
        for (&j, &v) in support.iter().zip(values) {
            out[j] = v;
        }
        CoefficientVector(out)
    }

    /// Maximum absolute difference between two vectors of equal length.
    pub fn max_abs_diff(&self, other: &CoefficientVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<Vec<f64>> for CoefficientVector {
    fn from(v: Vec<f64>) -> Self {
        CoefficientVector::from_vec(v)
    }
}

impl From<DVector<f64>> for CoefficientVector {
    fn from(v: DVector<f64>) -> Self {
        CoefficientVector(v)
    }
}

/// Strictly increasing list of column indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    /// Validates that `indices` is strictly increasing and every entry is below `p`.
    pub fn new(indices: Vec<usize>, p: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "support indices must be strictly increasing: {indices:?}"
            )));
        }
        if let Some(&last) = indices.last() {
            if last >= p {
                return Err(Error::invalid(format!(
                    "support index {last} out of range for p = {p}"
                )));
            }
        }
        Ok(SupportSet(indices))
    }

    /// Sorts and deduplicates arbitrary indices.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        SupportSet(indices)
    }

    pub fn empty() -> Self {
        SupportSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    /// Indices in `0..p` not in the support.
    pub fn complement(&self, p: usize) -> SupportSet {
        SupportSet((0..p).filter(|&j| !self.contains(j)).collect())
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

/// `Σ |β̂ⱼ − βⱼ|`.
pub fn l1_loss(beta_hat: &CoefficientVector, beta_true: &CoefficientVector) -> Result<f64> {
    check_same_len(beta_hat, beta_true)?;
    Ok(beta_hat
        .as_slice()
        .iter()
        .zip(beta_true.as_slice())
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// Squared Euclidean distance `Σ (β̂ⱼ − βⱼ)²`.
pub fn l2_loss(beta_hat: &CoefficientVector, beta_true: &CoefficientVector) -> Result<f64> {
    check_same_len(beta_hat, beta_true)?;
    Ok(beta_hat
        .as_slice()
        .iter()
        .zip(beta_true.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

fn check_same_len(a: &CoefficientVector, b: &CoefficientVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            found: a.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_vectors_have_zero_loss() {
        let b = CoefficientVector::from_vec(vec![9.0, 6.0, 0.0]);
        assert_eq!(l1_loss(&b, &b).unwrap(), 0.0);
        assert_eq!(l2_loss(&b, &b).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_losses() {
        let truth = CoefficientVector::from_vec(vec![9.0, 6.0, 0.0]);
        let est = CoefficientVector::from_vec(vec![9.1, 5.9, 0.0]);
        assert!((l1_loss(&est, &truth).unwrap() - 0.2).abs() < 1e-12);

        let a = CoefficientVector::from_vec(vec![3.0, 4.0]);
        let z = CoefficientVector::zeros(2);
        assert_eq!(l2_loss(&a, &z).unwrap(), 25.0);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let a = CoefficientVector::zeros(2);
        let b = CoefficientVector::zeros(3);
        assert!(matches!(
            l1_loss(&a, &b),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
        assert!(l2_loss(&a, &b).is_err());
    }

    #[test]
    fn support_uses_zero_tolerance() {
        let b = CoefficientVector::from_vec(vec![1e-13, -2.0, 0.0, 5e-12]);
        assert_eq!(b.support().indices(), &[1, 3]);
    }

    #[test]
    fn support_set_validation() {
        assert!(SupportSet::new(vec![0, 2, 5], 6).is_ok());
        assert!(SupportSet::new(vec![0, 2, 2], 6).is_err());
        assert!(SupportSet::new(vec![3, 1], 6).is_err());
        assert!(SupportSet::new(vec![6], 6).is_err());
        assert_eq!(SupportSet::from_unsorted(vec![4, 1, 4]).indices(), &[1, 4]);
        assert_eq!(SupportSet::from_unsorted(vec![1]).complement(3).indices(), &[0, 2]);
    }

    fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..20).prop_flat_map(|p| {
            (
                proptest::collection::vec(-50.0f64..50.0, p),
                proptest::collection::vec(-50.0f64..50.0, p),
            )
        })
    }

    proptest! {
        #[test]
        fn l1_matches_reversed_summation((a, b) in pair()) {
            let got = l1_loss(&a.clone().into(), &b.clone().into()).unwrap();
            let mut reference = 0.0;
            for j in (0..a.len()).rev() {
                reference += (a[j] - b[j]).abs();
            }
            prop_assert!((got - reference).abs() <= 1e-12 * (1.0 + reference));
        }

        #[test]
        fn l2_bounded_by_squared_l1((a, b) in pair()) {
            let a: CoefficientVector = a.into();
            let b: CoefficientVector = b.into();
            let l1 = l1_loss(&a, &b).unwrap();
            let l2 = l2_loss(&a, &b).unwrap();
            prop_assert!(l1 >= 0.0 && l2 >= 0.0);
            prop_assert!(l2 <= l1 * l1 * (1.0 + 1e-12));
            prop_assert_eq!(l1 == 0.0, a == b);
            prop_assert_eq!(l2 == 0.0, a == b);
        }
    }
}
