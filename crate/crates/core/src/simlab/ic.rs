use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::solve_spd;
use crate::model::SupportSet;

/// Irrepresentable-condition statistic `‖C₂₁ C₁₁⁻¹ s‖∞` with `C = n⁻¹X'X`.
/// Values of at least 1 mean the condition fails for `(S, s)`.
pub fn ic_check(x: &DMatrix<f64>, support: &SupportSet, signs: &[f64]) -> Result<f64> {
    let n = x.nrows() as f64;
    let gram = x.tr_mul(x) / n;
    ic_check_population(&gram, support, signs)
}

/// Same statistic for a given (population) covariance matrix.
pub fn ic_check_population(cov: &DMatrix<f64>, support: &SupportSet, signs: &[f64]) -> Result<f64> {
    let p = cov.nrows();
    if signs.len() != support.len() {
        return Err(Error::DimensionMismatch {
            expected: support.len(),
            found: signs.len(),
        });
    }
    if support.indices().iter().any(|&j| j >= p) {
        return Err(Error::invalid(format!("support {support} out of range for p = {p}")));
    }
    let s = support.indices();
    let rest = support.complement(p);
    if rest.is_empty() {
        return Ok(0.0);
    }
    let c11 = cov.select_rows(s).select_columns(s);
    let c21 = cov.select_rows(rest.indices()).select_columns(s);
    let v = solve_spd(&c11, &DVector::from_column_slice(signs))
        .ok_or_else(|| Error::invalid(format!("C11 is singular on support {support}")))?;
    Ok((c21 * v).amax())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simlab::{generate, Covariance, SimDesign};

    #[test]
    fn orthogonal_design_gives_zero() {
        let x = DMatrix::<f64>::identity(6, 6);
        let s = SupportSet::new(vec![0, 2], 6).unwrap();
        assert_eq!(ic_check(&x, &s, &[1.0, -1.0]).unwrap(), 0.0);
    }

    #[test]
    fn population_violation_equals_one() {
        let d = SimDesign::with_leading(10, 200, &[9.0, 6.0], 1.0, Covariance::IcViolation, 0).unwrap();
        let s = SupportSet::new(vec![0, 1], 200).unwrap();
        let v = ic_check_population(&d.population_cov(), &s, &[1.0, 1.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sample_statistic_converges() {
        let d = SimDesign::with_leading(100_000, 6, &[9.0, 6.0], 1.0, Covariance::IcViolation, 21).unwrap();
        let (ds, _) = generate(&d).unwrap();
        let s = SupportSet::new(vec![0, 1], 6).unwrap();
        let v = ic_check(ds.x(), &s, &[1.0, 1.0]).unwrap();
        assert!((v - 1.0).abs() < 0.02, "sample IC statistic {v}");
    }

    #[test]
    fn singular_block_rejected() {
        let x = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 2.0, 2.0, 1.0, 3.0, 3.0, 0.0]);
        let s = SupportSet::new(vec![0, 1], 3).unwrap();
        assert!(ic_check(&x, &s, &[1.0, 1.0]).is_err());
    }
}
