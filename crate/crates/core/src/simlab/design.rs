use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{CoefficientVector, Dataset, SupportSet};
use crate::rng::{stream, StreamRng};

/// Covariance structure of the design rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Covariance {
    Identity,
    /// `Σᵢⱼ = ρ^|i−j|`.
    Ar1(f64),
    /// Independent standard normal columns except the last, which is
    /// `x₁/6 + 5x₂/6 + x₃/2 + e/6` with independent standard normal `e`.
    IcViolation,
}

impl std::str::FromStr for Covariance {
    type Err = Error;

    /// Accepts the [`Display`](fmt::Display) forms, plus `ar1:<rho>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let rho = s
            .strip_prefix("ar1(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("ar1:"));
        match (s.as_str(), rho) {
            ("identity", _) => Ok(Covariance::Identity),
            ("ic_violation", _) => Ok(Covariance::IcViolation),
            (_, Some(r)) => r
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|r| r.abs() < 1.0)
                .map(Covariance::Ar1)
                .ok_or_else(|| Error::invalid(format!("ar1 correlation must lie in (-1, 1), got `{r}`"))),
            _ => Err(Error::invalid(format!(
                "unknown covariance `{s}` (expected identity, ar1(<rho>) or ic_violation)"
            ))),
        }
    }
}

impl fmt::Display for Covariance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Covariance::Identity => write!(f, "identity"),
            Covariance::Ar1(rho) => write!(f, "ar1({rho})"),
            Covariance::IcViolation => write!(f, "ic_violation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimDesign {
    pub n: usize,
    pub p: usize,
    pub beta_true: CoefficientVector,
    pub sigma: f64,
    pub cov: Covariance,
    pub seed: u64,
}

impl SimDesign {
    pub fn new(n: usize, p: usize, beta_true: CoefficientVector, sigma: f64, cov: Covariance, seed: u64) -> Result<Self> {
        let d = SimDesign {
            n,
            p,
            beta_true,
            sigma,
            cov,
            seed,
        };
        d.validate()?;
        Ok(d)
    }

    /// Leading coefficients `lead`, zero elsewhere.
    pub fn with_leading(n: usize, p: usize, lead: &[f64], sigma: f64, cov: Covariance, seed: u64) -> Result<Self> {
        if lead.len() > p {
            return Err(Error::invalid(format!("{} nonzero coefficients exceed p = {p}", lead.len())));
        }
        let mut beta = vec![0.0; p];
        beta[..lead.len()].copy_from_slice(lead);
        SimDesign::new(n, p, CoefficientVector::from_vec(beta), sigma, cov, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(Error::invalid("design needs n >= 1 and p >= 1"));
        }
        if self.beta_true.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                found: self.beta_true.len(),
            });
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be finite and >= 0, got {}", self.sigma)));
        }
        if self.beta_true.as_slice().iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite {
                location: "beta_true".into(),
            });
        }
        match self.cov {
            Covariance::Ar1(rho) if !(rho.abs() < 1.0) => Err(Error::invalid(format!("ar1 needs |rho| < 1, got {rho}"))),
            Covariance::IcViolation if self.p < 4 => Err(Error::invalid("ic_violation needs p >= 4")),
            _ => Ok(()),
        }
    }

    pub fn with_n(&self, n: usize) -> SimDesign {
        SimDesign { n, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> SimDesign {
        SimDesign { seed, ..self.clone() }
    }

    pub fn true_support(&self) -> SupportSet {
        self.beta_true.support()
    }

    /// Short label such as `p=10, n=100, ar1(0.5)`.
    pub fn label(&self) -> String {
        format!("p={}, n={}, {}", self.p, self.n, self.cov)
    }

    /// Population covariance of one design row.
    pub fn population_cov(&self) -> DMatrix<f64> {
        let p = self.p;
        match self.cov {
            Covariance::Identity => DMatrix::identity(p, p),
            Covariance::Ar1(rho) => DMatrix::from_fn(p, p, |i, j| rho.powi((i as i32 - j as i32).abs())),
            Covariance::IcViolation => {
                let mut s = DMatrix::identity(p, p);
                let coef = ic_coefficients();
                for (k, &c) in coef.iter().enumerate() {
                    s[(k, p - 1)] = c;
                    s[(p - 1, k)] = c;
                }
                s[(p - 1, p - 1)] = coef.iter().map(|c| c * c).sum::<f64>() + IC_NOISE * IC_NOISE;
                s
            }
        }
    }
}

const IC_NOISE: f64 = 1.0 / 6.0;

fn ic_coefficients() -> [f64; 3] {
    [1.0 / 6.0, 5.0 / 6.0, 0.5]
}

/// Replication 0 of the design.
pub fn generate(design: &SimDesign) -> Result<(Dataset, CoefficientVector)> {
    generate_replication(design, 0)
}

/// Draws replication `rep`: design rows (row by row, columns left to right),
/// then the noise.
pub fn generate_replication(design: &SimDesign, rep: u64) -> Result<(Dataset, CoefficientVector)> {
    design.validate()?;
    let mut rng = stream(design.seed, rep);
    let x = draw_design(design, &mut rng);
    let noise = DVector::from_fn(design.n, |_, _| normal(&mut rng));
    let y = &x * design.beta_true.values() + noise * design.sigma;
    Ok((Dataset::new(x, y)?, design.beta_true.clone()))
}

fn normal(rng: &mut StreamRng) -> f64 {
    StandardNormal.sample(rng)
}

fn draw_design(design: &SimDesign, rng: &mut StreamRng) -> DMatrix<f64> {
    let (n, p) = (design.n, design.p);
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        match design.cov {
            Covariance::Identity => {
                for j in 0..p {
                    x[(i, j)] = normal(rng);
                }
            }
            Covariance::Ar1(rho) => {
                let innov = (1.0 - rho * rho).sqrt();
                x[(i, 0)] = normal(rng);
                for j in 1..p {
                    x[(i, j)] = rho * x[(i, j - 1)] + innov * normal(rng);
                }
            }
            Covariance::IcViolation => {
                for j in 0..p - 1 {
                    x[(i, j)] = normal(rng);
                }
                let c = ic_coefficients();
                let e = normal(rng);
                x[(i, p - 1)] = c[0] * x[(i, 0)] + c[1] * x[(i, 1)] + c[2] * x[(i, 2)] + IC_NOISE * e;
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariance_names_round_trip() {
        for c in [Covariance::Identity, Covariance::Ar1(0.5), Covariance::IcViolation] {
            assert_eq!(c.to_string().parse::<Covariance>().unwrap(), c);
        }
        assert_eq!("ar1:0.25".parse::<Covariance>().unwrap(), Covariance::Ar1(0.25));
        assert!("ar1(1.5)".parse::<Covariance>().is_err());
        assert!("toeplitz".parse::<Covariance>().is_err());
    }

    #[test]
    fn noiseless_response_is_exact() {
        let d = SimDesign::with_leading(30, 5, &[9.0, 6.0], 0.0, Covariance::Ar1(0.3), 1).unwrap();
        let (ds, beta) = generate(&d).unwrap();
        assert_eq!(ds.y(), &(ds.x() * beta.values()));
    }

    #[test]
    fn replications_are_reproducible_and_distinct() {
        let d = SimDesign::with_leading(20, 4, &[1.0], 1.0, Covariance::IcViolation, 9).unwrap();
        let a = generate_replication(&d, 3).unwrap().0;
        let b = generate_replication(&d, 3).unwrap().0;
        let c = generate_replication(&d, 4).unwrap().0;
        assert_eq!(a, b);
        assert_ne!(a.x(), c.x());
    }

    #[test]
    fn invalid_designs_rejected() {
        let beta = CoefficientVector::zeros(3);
        assert!(SimDesign::new(10, 3, beta.clone(), 1.0, Covariance::Ar1(1.0), 0).is_err());
        assert!(SimDesign::new(10, 3, beta.clone(), 1.0, Covariance::IcViolation, 0).is_err());
        assert!(SimDesign::new(10, 3, beta.clone(), -1.0, Covariance::Identity, 0).is_err());
        assert!(SimDesign::new(10, 4, beta, 1.0, Covariance::Identity, 0).is_err());
    }

    #[test]
    fn ic_violation_last_column_has_unit_variance() {
        let d = SimDesign::with_leading(10, 6, &[1.0], 1.0, Covariance::IcViolation, 0).unwrap();
        let s = d.population_cov();
        assert!((s[(5, 5)] - 1.0).abs() < 1e-15);
        assert_eq!(s[(1, 5)], 5.0 / 6.0);
    }
}
