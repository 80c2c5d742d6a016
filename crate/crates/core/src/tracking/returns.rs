use crate::error::{Error, Result};

/// Trading days per year used to annualize tracking errors.
pub const TRADING_DAYS: f64 = 252.0;

/// Simple returns `(Pₜ − Pₜ₋₁) / Pₜ₋₁`.
pub fn daily_returns(prices: &[f64]) -> Result<Vec<f64>> {
    if prices.len() < 2 {
        return Err(Error::invalid(format!("need at least two prices, got {}", prices.len())));
    }
    if let Some(p) = prices.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
        return Err(Error::invalid(format!("prices must be positive, got {p}")));
    }
    Ok(prices.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect())
}

/// Annualized tracking error: `√252` times the sample standard deviation
/// (divisor `T − 1`) of `actual − replicated`.
pub fn tracking_error(actual: &[f64], replicated: &[f64]) -> Result<f64> {
    if actual.len() != replicated.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            found: replicated.len(),
        });
    }
    let t = actual.len();
    if t < 2 {
        return Err(Error::invalid(format!("tracking error needs at least two returns, got {t}")));
    }
    let err: Vec<f64> = actual.iter().zip(replicated).map(|(a, r)| a - r).collect();
    if err.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite {
            location: "tracking error input".into(),
        });
    }
    let mean = err.iter().sum::<f64>() / t as f64;
    let ss: f64 = err.iter().map(|e| (e - mean).powi(2)).sum();
    Ok(TRADING_DAYS.sqrt() * (ss / (t - 1) as f64).sqrt())
}
