//! One-factor synthetic price panels whose index is a fixed basket of a few
//! assets, optionally perturbed by i.i.d. return noise.

use chrono::{Datelike, Days, NaiveDate, Weekday};
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand_distr::{Distribution, Normal, Uniform};

use super::panel::PricePanel;
use crate::error::{Error, Result};
use crate::rng::stream;

/// How the index combines its holdings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexRule {
    /// Fixed share counts: the noiseless index is a linear combination of prices.
    BuyAndHold,
    /// Fixed return weights, rebalanced daily: the noiseless index return is a
    /// linear combination of asset returns.
    Rebalanced,
}

impl std::str::FromStr for IndexRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "buy_and_hold" => Ok(IndexRule::BuyAndHold),
            "rebalanced" => Ok(IndexRule::Rebalanced),
            other => Err(Error::invalid(format!(
                "unknown index rule `{other}` (expected buy_and_hold or rebalanced)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    /// Trading days.
    pub t: usize,
    pub p: usize,
    /// Number of assets held by the index.
    pub holdings: usize,
    /// Daily s.d. of the noise added to index returns.
    pub noise_sd: f64,
    pub market_vol: f64,
    pub idio_vol: f64,
    pub rule: IndexRule,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            t: 508,
            p: 100,
            holdings: 20,
            noise_sd: 0.001,
            market_vol: 0.01,
            idio_vol: 0.015,
            rule: IndexRule::BuyAndHold,
            seed: 0,
        }
    }
}

/// A generated panel and the basket behind its index.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPanel {
    pub panel: PricePanel,
    /// `(asset column, amount)` sorted by column: share counts for
    /// [`IndexRule::BuyAndHold`], return weights summing to one for
    /// [`IndexRule::Rebalanced`].
    pub holdings: Vec<(usize, f64)>,
}

fn trading_days(start: NaiveDate, t: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(t);
    let mut d = start;
    while out.len() < t {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

/// Replication `rep` of `spec`. The index follows `Iₜ = Iₜ₋₁ (1 + bₜ + ηₜ)`
/// with `ηₜ ~ N(0, noise_sd²)` and `bₜ` the basket return: `Vₜ / Vₜ₋₁ − 1`
/// for buy-and-hold value `V`, or `Σ wⱼ rⱼₜ` when rebalanced. With
/// `noise_sd = 0` the index is an exact combination of prices (buy-and-hold)
/// or of returns (rebalanced).
pub fn synthetic_panel(spec: &SyntheticSpec, rep: u64) -> Result<SyntheticPanel> {
    if spec.t < 2 || spec.p == 0 || spec.holdings == 0 || spec.holdings > spec.p {
        return Err(Error::invalid("synthetic panel needs t >= 2 and 1 <= holdings <= p"));
    }
    for v in [spec.noise_sd, spec.market_vol, spec.idio_vol] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::invalid("volatilities must be finite and >= 0"));
        }
    }
    let mut rng = stream(spec.seed, rep);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let start_price = Uniform::new(20.0, 100.0).expect("range");
    let loading = Uniform::new(0.5, 1.5).expect("range");
    let shares = Uniform::new(1.0, 10.0).expect("range");

    let betas: Vec<f64> = (0..spec.p).map(|_| loading.sample(&mut rng)).collect();
    let mut assets = DMatrix::zeros(spec.t, spec.p);
    for j in 0..spec.p {
        assets[(0, j)] = start_price.sample(&mut rng);
    }
    for i in 1..spec.t {
        let f = spec.market_vol * std_normal.sample(&mut rng);
        for j in 0..spec.p {
            let r = betas[j] * f + spec.idio_vol * std_normal.sample(&mut rng);
            // keep prices positive under extreme draws
            assets[(i, j)] = assets[(i - 1, j)] * (1.0 + r).max(0.05);
        }
    }
    let mut held: Vec<usize> = sample(&mut rng, spec.p, spec.holdings).into_vec();
    held.sort_unstable();
    let mut holdings: Vec<(usize, f64)> = held.iter().map(|&j| (j, shares.sample(&mut rng))).collect();
    let value = |i: usize, h: &[(usize, f64)]| -> f64 { h.iter().map(|&(j, q)| q * assets[(i, j)]).sum() };
    let v0 = value(0, &holdings);
    if spec.rule == IndexRule::Rebalanced {
        for (j, q) in &mut holdings {
            *q *= assets[(0, *j)] / v0;
        }
    }
    let mut index = DVector::zeros(spec.t);
    index[0] = v0;
    for i in 1..spec.t {
        let basket = match spec.rule {
            IndexRule::BuyAndHold => value(i, &holdings) / value(i - 1, &holdings) - 1.0,
            IndexRule::Rebalanced => holdings
                .iter()
                .map(|&(j, w)| w * (assets[(i, j)] / assets[(i - 1, j)] - 1.0))
                .sum(),
        };
        let eta = if spec.noise_sd > 0.0 { spec.noise_sd * std_normal.sample(&mut rng) } else { 0.0 };
        index[i] = index[i - 1] * (1.0 + basket + eta);
    }
    let width = (spec.p - 1).to_string().len();
    let names = (0..spec.p).map(|j| format!("A{j:0width$}")).collect();
    let start = NaiveDate::from_ymd_opt(2020, 1, 2).expect("valid date");
    let panel = PricePanel::new(trading_days(start, spec.t), index, assets, names)?;
    Ok(SyntheticPanel { panel, holdings })
}
