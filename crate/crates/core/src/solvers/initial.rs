use super::aenet::fit_with_moments;
use super::moments::Moments;
use crate::error::{Error, Result};
use crate::model::{CoefficientVector, Dataset, PenaltySpec};

/// Noise level used to tune the initial lasso.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLevel {
    Known(f64),
    /// Estimated from a pilot lasso at `√(2 log p / n)` as `RSS / (n − |Ŝ|)`.
    Auto,
}

/// Lasso scaled as `1/(2n)‖y − Xβ‖² + λ‖β‖₁` at `λ = 4σ̂ √(log p / n)`,
/// for standardized data. Used as the source of adaptive weights.
pub fn initial_estimator(ds: &Dataset, sigma: NoiseLevel) -> Result<CoefficientVector> {
    initial_estimator_with_moments(ds, &Moments::new(ds), sigma)
}

pub fn initial_estimator_with_moments(ds: &Dataset, moments: &Moments, sigma: NoiseLevel) -> Result<CoefficientVector> {
    let sigma_hat = match sigma {
        NoiseLevel::Known(s) => {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::invalid(format!("sigma must be > 0, got {s}")));
            }
            s
        }
        NoiseLevel::Auto => estimate_sigma(ds, moments)?,
    };
    let (n, p) = (ds.n() as f64, ds.p() as f64);
    let lambda = 4.0 * sigma_hat * (p.ln() / n).sqrt();
    lasso_per_observation(ds, moments, lambda)
}

/// Pilot-lasso noise estimate, clipped below at `σ̂² = 1e−6`.
pub fn estimate_sigma(ds: &Dataset, moments: &Moments) -> Result<f64> {
    let (n, p) = (ds.n() as f64, ds.p() as f64);
    let pilot = lasso_per_observation(ds, moments, (2.0 * p.ln() / n).sqrt())?;
    let rss = (ds.y() - ds.x() * pilot.values()).norm_squared();
    let dof = (ds.n() as f64 - pilot.support().len() as f64).max(1.0);
    Ok((rss / dof).max(1e-6).sqrt())
}

/// Lasso at per-observation penalty `lambda` (the ½-scaled solver needs `n·λ`).
fn lasso_per_observation(ds: &Dataset, moments: &Moments, lambda: f64) -> Result<CoefficientVector> {
    let spec = PenaltySpec::unweighted(ds.n() as f64 * lambda, 0.0, ds.p())?;
    Ok(fit_with_moments(ds, moments, &spec)?.beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{gaussian_design, orthonormal_dataset};
    use nalgebra::DVector;

    #[test]
    fn orthonormal_case_is_soft_threshold() {
        let ds = orthonormal_dataset(20, 2, 31);
        let n = ds.n() as f64;
        let sigma = 0.8;
        let lambda = 4.0 * sigma * (2f64.ln() / n).sqrt();
        let z = ds.x().tr_mul(ds.y()) / n;
        let got = initial_estimator(&ds, NoiseLevel::Known(sigma)).unwrap();
        for j in 0..2 {
            let expected = z[j].signum() * (z[j].abs() - lambda).max(0.0);
            assert!((got.get(j) - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn single_predictor_reduces_to_least_squares() {
        // log(1) = 0 so the threshold vanishes
        let ds = orthonormal_dataset(10, 1, 32);
        let got = initial_estimator(&ds, NoiseLevel::Known(1.0)).unwrap();
        let z = ds.x().column(0).dot(ds.y()) / 10.0;
        assert!((got.get(0) - z).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_sigma_rejected() {
        let ds = orthonormal_dataset(10, 2, 33);
        assert!(initial_estimator(&ds, NoiseLevel::Known(0.0)).is_err());
        assert!(initial_estimator(&ds, NoiseLevel::Known(-1.0)).is_err());
    }

    #[test]
    fn noiseless_strong_signal_keeps_true_support() {
        for seed in 0..20 {
            let x = gaussian_design(60, 40, 400 + seed);
            let mut beta = DVector::zeros(40);
            beta[3] = 5.0;
            beta[17] = -4.0;
            beta[29] = 3.0;
            let y = &x * &beta;
            let ds = Dataset::new(x, y).unwrap();
            let est = initial_estimator(&ds, NoiseLevel::Known(1e-6)).unwrap();
            let support = est.support();
            for j in [3, 17, 29] {
                assert!(support.contains(j), "seed {seed}: missing {j}");
            }
        }
    }

    #[test]
    fn auto_sigma_is_positive_and_sane() {
        let x = gaussian_design(80, 10, 34);
        let mut beta = DVector::zeros(10);
        beta[0] = 2.0;
        let noise = gaussian_design(80, 1, 35).column(0).into_owned();
        let y = &x * &beta + noise * 0.5;
        let ds = Dataset::new(x, y).unwrap();
        let s = estimate_sigma(&ds, &Moments::new(&ds)).unwrap();
        assert!(s > 0.3 && s < 0.7, "sigma_hat = {s}");
        assert!(initial_estimator(&ds, NoiseLevel::Auto).unwrap().support().contains(0));
    }
}
