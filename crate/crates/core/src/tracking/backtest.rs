use std::fmt;
use std::io::Write;
use std::str::FromStr;

use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::panel::PricePanel;
use super::returns::{daily_returns, tracking_error};
use super::windows::{make_windows, BacktestWindow};
use crate::error::{Error, Result};
use crate::model::{standardize, CoefficientVector, Dataset, StandardizeOptions};
use crate::solvers::{
    adaptive_weights, initial_estimator_with_moments, penalized_path, select_k_with_coefficients, LarsOptions,
    Moments, NoiseLevel, RegularizationPath,
};
use crate::ssls::ols_refit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrackMethod {
    Ssls,
    Lasso,
}

impl TrackMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TrackMethod::Ssls => "ssls",
            TrackMethod::Lasso => "lasso",
        }
    }
}

impl fmt::Display for TrackMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrackMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ssls" => Ok(TrackMethod::Ssls),
            "lasso" => Ok(TrackMethod::Lasso),
            other => Err(Error::invalid(format!("unknown tracking method `{other}` (expected ssls or lasso)"))),
        }
    }
}

/// What the replication regression is fitted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegressOn {
    /// Index price on asset prices; predictions are turned into returns
    /// before scoring.
    Prices,
    /// Index returns on asset returns.
    Returns,
}

impl FromStr for RegressOn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "prices" => Ok(RegressOn::Prices),
            "returns" => Ok(RegressOn::Returns),
            other => Err(Error::invalid(format!("unknown regression target `{other}` (expected prices or returns)"))),
        }
    }
}

/// Initial estimator behind the SSLS adaptive weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrackInitial {
    /// Lasso at `4σ̂√(log p / n)` with the noise level estimated from a pilot fit.
    TheoryLasso,
    /// Lasso path coefficients at support size `ceil(multiple · k)`, or the
    /// end of the path when it stops short of that size.
    PathMultiple(f64),
}

impl FromStr for TrackInitial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "theory" {
            return Ok(TrackInitial::TheoryLasso);
        }
        match s.strip_prefix("path:").map(|m| m.parse::<f64>()) {
            Some(Ok(m)) if m >= 1.0 && m.is_finite() => Ok(TrackInitial::PathMultiple(m)),
            _ => Err(Error::invalid(format!(
                "unknown initial estimator `{s}` (expected theory or path:<multiple >= 1>)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestConfig {
    pub n_train: usize,
    pub n_test: usize,
    pub stride: usize,
    pub k_list: Vec<usize>,
    pub methods: Vec<TrackMethod>,
    /// Adaptive weight exponent of the SSLS selector.
    pub gamma: f64,
    /// Ridge penalty of the SSLS selector (on standardized prices).
    pub lambda2: f64,
    pub regress_on: RegressOn,
    pub initial: TrackInitial,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        BacktestConfig {
            n_train: 98,
            n_test: 20,
            stride: 20,
            k_list: vec![20, 30, 50],
            methods: vec![TrackMethod::Ssls, TrackMethod::Lasso],
            gamma: 1.0,
            lambda2: 1.0,
            regress_on: RegressOn::Prices,
            initial: TrackInitial::PathMultiple(3.0),
        }
    }
}

impl BacktestConfig {
    pub fn validate(&self, p: usize) -> Result<()> {
        if self.k_list.is_empty() || self.methods.is_empty() {
            return Err(Error::invalid("k_list and methods must be non-empty"));
        }
        let rows = match self.regress_on {
            RegressOn::Prices => self.n_train,
            RegressOn::Returns => self.n_train.saturating_sub(1),
        };
        for &k in &self.k_list {
            if k == 0 || k > rows || k > p {
                return Err(Error::invalid(format!(
                    "stock budget {k} must lie in 1..={} (training rows {rows}, assets {p})",
                    rows.min(p)
                )));
            }
        }
        if let TrackInitial::PathMultiple(m) = self.initial {
            if !(m >= 1.0 && m.is_finite()) {
                return Err(Error::invalid(format!("initial path multiple must be >= 1, got {m}")));
            }
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) || !(self.lambda2 >= 0.0 && self.lambda2.is_finite()) {
            return Err(Error::invalid("gamma and lambda2 must be finite and >= 0"));
        }
        Ok(())
    }
}

/// A successful replication fit for one window, method and budget.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingFit {
    pub fitted_te: f64,
    pub predicted_te: f64,
    /// `(asset column, weight)` over the selected assets.
    pub weights: Vec<(usize, f64)>,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingRow {
    pub window: BacktestWindow,
    pub method: TrackMethod,
    pub k: usize,
    /// The fit, or the reason the window failed.
    pub outcome: std::result::Result<TrackingFit, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingReport {
    pub dates: Vec<NaiveDate>,
    pub names: Vec<String>,
    pub k_list: Vec<usize>,
    pub methods: Vec<TrackMethod>,
    pub windows: Vec<BacktestWindow>,
    /// Ordered by window, then method, then k as configured.
    pub rows: Vec<TrackingRow>,
}

/// Rolling-window replication backtest. Windows run in parallel and a
/// failing window is recorded without stopping the others.
pub fn backtest(panel: &PricePanel, cfg: &BacktestConfig) -> Result<TrackingReport> {
    cfg.validate(panel.n_assets())?;
    let windows = make_windows(panel.len(), cfg.n_train, cfg.n_test, cfg.stride)?;
    let rows: Vec<Vec<TrackingRow>> = windows
        .par_iter()
        .map(|w| run_window(panel, cfg, *w))
        .collect();
    Ok(TrackingReport {
        dates: panel.dates().to_vec(),
        names: panel.names().to_vec(),
        k_list: cfg.k_list.clone(),
        methods: cfg.methods.clone(),
        windows,
        rows: rows.into_iter().flatten().collect(),
    })
}

fn run_window(panel: &PricePanel, cfg: &BacktestConfig, w: BacktestWindow) -> Vec<TrackingRow> {
    let prepared = WindowData::new(panel, cfg.regress_on, w);
    let mut out = Vec::with_capacity(cfg.methods.len() * cfg.k_list.len());
    for &method in &cfg.methods {
        let fits: Vec<std::result::Result<TrackingFit, String>> = match &prepared {
            Ok(data) => data.fit_all(method, cfg),
            Err(e) => vec![Err(e.to_string()); cfg.k_list.len()],
        };
        for (&k, outcome) in cfg.k_list.iter().zip(fits) {
            out.push(TrackingRow {
                window: w,
                method,
                k,
                outcome,
            });
        }
    }
    out
}

/// Design of one window: training regression plus the rows needed to score it.
struct WindowData {
    mode: RegressOn,
    train: Dataset,
    /// Design and target covering the last training row through the test end.
    test_x: DMatrix<f64>,
    test_y: DVector<f64>,
}

fn rows_of(panel: &PricePanel, range: std::ops::Range<usize>) -> (DMatrix<f64>, DVector<f64>) {
    let x = panel.assets().rows(range.start, range.len()).into_owned();
    let y = panel.index().rows(range.start, range.len()).into_owned();
    (x, y)
}

fn to_returns(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let yr = DVector::from_vec(daily_returns(y.as_slice())?);
    let mut xr = DMatrix::zeros(x.nrows() - 1, x.ncols());
    for j in 0..x.ncols() {
        let col: Vec<f64> = x.column(j).iter().copied().collect();
        xr.set_column(j, &DVector::from_vec(daily_returns(&col)?));
    }
    Ok((xr, yr))
}

impl WindowData {
    fn new(panel: &PricePanel, mode: RegressOn, w: BacktestWindow) -> Result<Self> {
        let (mut x, mut y) = rows_of(panel, w.train());
        let (mut test_x, mut test_y) = rows_of(panel, w.train_end - 1..w.test_end);
        if mode == RegressOn::Returns {
            (x, y) = to_returns(&x, &y)?;
            (test_x, test_y) = to_returns(&test_x, &test_y)?;
        }
        Ok(WindowData {
            mode,
            train: Dataset::new(x, y)?,
            test_x,
            test_y,
        })
    }

    fn fit_all(&self, method: TrackMethod, cfg: &BacktestConfig) -> Vec<std::result::Result<TrackingFit, String>> {
        let prepared = standardize(&self.train, StandardizeOptions { drop_constant: true }).and_then(|(std_ds, record)| {
            let moments = Moments::new(&std_ds);
            let kmax = *cfg.k_list.iter().max().expect("validated non-empty");
            let depth = match (method, cfg.initial) {
                (TrackMethod::Ssls, TrackInitial::PathMultiple(m)) => initial_size(kmax, m, &std_ds),
                _ => kmax,
            };
            let lasso = truncated_path(&moments, 0.0, &vec![1.0; std_ds.p()], depth)?;
            Ok((std_ds, record, moments, lasso))
        });
        let (std_ds, record, moments, lasso) = match prepared {
            Ok(v) => v,
            Err(e) => return vec![Err(e.to_string()); cfg.k_list.len()],
        };
        let theory = match (method, cfg.initial) {
            (TrackMethod::Ssls, TrackInitial::TheoryLasso) => {
                Some(initial_estimator_with_moments(&std_ds, &moments, NoiseLevel::Auto))
            }
            _ => None,
        };
        cfg.k_list
            .iter()
            .map(|&k| {
                let beta_std = match method {
                    TrackMethod::Lasso => select_k_with_coefficients(&lasso, k).map(|(_, b)| b),
                    TrackMethod::Ssls => ssls_at_k(&std_ds, &moments, &lasso, theory.as_ref(), k, cfg),
                };
                beta_std
                    .and_then(|b| {
                        let (beta, intercept) = record.to_original(&b);
                        self.score(&beta, intercept, k)
                    })
                    .map_err(|e| e.to_string())
            })
            .collect()
    }

    fn score(&self, beta: &CoefficientVector, intercept: f64, k: usize) -> Result<TrackingFit> {
        let weights: Vec<(usize, f64)> = beta
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, b)| (j, *b))
            .collect();
        if weights.len() != k {
            return Err(Error::invalid(format!("fit has {} nonzero weights, budget is {k}", weights.len())));
        }
        let fitted = self.train.x() * beta.values();
        let predicted = &self.test_x * beta.values();
        let (fitted, predicted) = (fitted.add_scalar(intercept), predicted.add_scalar(intercept));
        let (fitted_te, predicted_te) = match self.mode {
            RegressOn::Prices => (
                tracking_error(&daily_returns(self.train.y().as_slice())?, &price_returns(&fitted)?)?,
                tracking_error(&daily_returns(self.test_y.as_slice())?, &price_returns(&predicted)?)?,
            ),
            RegressOn::Returns => (
                tracking_error(self.train.y().as_slice(), fitted.as_slice())?,
                tracking_error(self.test_y.as_slice(), predicted.as_slice())?,
            ),
        };
        Ok(TrackingFit {
            fitted_te,
            predicted_te,
            weights,
            intercept,
        })
    }
}

fn price_returns(prices: &DVector<f64>) -> Result<Vec<f64>> {
    daily_returns(prices.as_slice())
        .map_err(|_| Error::invalid("replicating portfolio value is not positive over the window"))
}

fn truncated_path(moments: &Moments, lambda2: f64, weights: &[f64], k: usize) -> Result<RegularizationPath> {
    let opts = LarsOptions {
        max_support: Some(k),
        ..LarsOptions::full(moments.p(), moments.n)
    };
    penalized_path(moments, lambda2, weights, &opts)
}

fn initial_size(k: usize, multiple: f64, ds: &Dataset) -> usize {
    let cap = ds.p().min(ds.n().saturating_sub(1)).max(k);
    ((multiple * k as f64).ceil() as usize).clamp(k, cap)
}

/// Two-stage fit with exactly `k` assets: adaptive elastic net path with
/// weights from the initial estimate, truncated at `k`, then OLS on the
/// chosen assets. An initial estimate with fewer than `k` nonzeros cannot
/// reach the budget, so the lasso path coefficients at `k` replace it.
fn ssls_at_k(
    ds: &Dataset,
    moments: &Moments,
    lasso: &RegularizationPath,
    theory: Option<&Result<CoefficientVector>>,
    k: usize,
    cfg: &BacktestConfig,
) -> Result<CoefficientVector> {
    let candidate = match (theory, cfg.initial) {
        (Some(Ok(b)), _) => Some(b.clone()),
        (Some(Err(_)), _) => None,
        (None, TrackInitial::PathMultiple(m)) => {
            let size = initial_size(k, m, ds);
            if lasso.max_support_size() < size {
                // the path ended first: take its least penalized solution
                Some(lasso.last().beta.clone())
            } else {
                select_k_with_coefficients(lasso, size).ok().map(|(_, b)| b)
            }
        }
        (None, TrackInitial::TheoryLasso) => None,
    };
    let init = match candidate {
        Some(b) if b.support().len() >= k => b,
        _ => select_k_with_coefficients(lasso, k)?.1,
    };
    let weights = adaptive_weights(&init, cfg.gamma);
    let path = truncated_path(moments, cfg.lambda2, &weights, k)?;
    let (support, _) = select_k_with_coefficients(&path, k)?;
    Ok(ols_refit(ds, &support)?.beta)
}

impl TrackingReport {
    fn window_dates(&self, w: &BacktestWindow) -> (NaiveDate, NaiveDate) {
        (self.dates[w.train_start], self.dates[w.test_end - 1])
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    pub fn get(&self, window: usize, method: TrackMethod, k: usize) -> Option<&TrackingRow> {
        let w = self.windows.get(window)?;
        self.rows
            .iter()
            .find(|r| r.window == *w && r.method == method && r.k == k)
    }

    /// Mean predicted TE over successful windows.
    pub fn mean_predicted(&self, method: TrackMethod, k: usize) -> Option<f64> {
        let v: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.method == method && r.k == k)
            .filter_map(|r| r.outcome.as_ref().ok().map(|f| f.predicted_te))
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    fn report_records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|row| {
                let (start, end) = self.window_dates(&row.window);
                let (fitted, predicted, status) = match &row.outcome {
                    Ok(f) => (f.fitted_te.to_string(), f.predicted_te.to_string(), "ok".to_string()),
                    Err(e) => (String::new(), String::new(), format!("failed: {e}")),
                };
                vec![
                    start.to_string(),
                    end.to_string(),
                    row.method.to_string(),
                    row.k.to_string(),
                    fitted,
                    predicted,
                    status,
                ]
            })
            .collect()
    }

    fn weight_records(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for row in &self.rows {
            let Ok(fit) = &row.outcome else { continue };
            let (start, _) = self.window_dates(&row.window);
            for &(j, weight) in &fit.weights {
                out.push(vec![
                    start.to_string(),
                    row.method.to_string(),
                    row.k.to_string(),
                    self.names[j].clone(),
                    weight.to_string(),
                ]);
            }
        }
        out
    }

    /// Columns `window_start, window_end, method, k, fitted_te, predicted_te, status`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_records(out, &REPORT_HEADER, None, [self.report_records()])
    }

    /// Columns `window_start, method, k, asset, weight`.
    pub fn write_weights_csv<W: Write>(&self, out: W) -> Result<()> {
        write_records(out, &WEIGHTS_HEADER, None, [self.weight_records()])
    }

    /// Two tables in percent with two decimals: per test period the fitted
    /// and predicted TE for each method and ascending budget, then the mean
    /// predicted TE by method with budgets in descending order.
    pub fn to_text_table(&self) -> String {
        let mut ks = self.k_list.clone();
        ks.sort_unstable();
        ks.dedup();
        let pct = |v: Option<f64>| v.map_or_else(|| "failed".to_string(), |v| format!("{:.2}", 100.0 * v));
        let mut header = vec!["Test period".to_string()];
        for m in &self.methods {
            header.extend(ks.iter().map(|k| format!("{m} Fitted({k})")));
            header.extend(ks.iter().map(|k| format!("{m} Pred({k})")));
        }
        let mut body = Vec::new();
        for (wi, w) in self.windows.iter().enumerate() {
            let mut line = vec![format!("{} to {}", self.dates[w.train_end], self.dates[w.test_end - 1])];
            for &m in &self.methods {
                let fit = |k: usize| self.get(wi, m, k).and_then(|r| r.outcome.as_ref().ok());
                line.extend(ks.iter().map(|&k| pct(fit(k).map(|f| f.fitted_te))));
                line.extend(ks.iter().map(|&k| pct(fit(k).map(|f| f.predicted_te))));
            }
            body.push(line);
        }
        let mut text = String::from("Annual tracking errors (%)\n");
        text.push_str(&render(&header, &body));
        let mut desc = ks.clone();
        desc.reverse();
        let mut header = vec!["Method".to_string()];
        header.extend(desc.iter().map(|k| k.to_string()));
        let body: Vec<Vec<String>> = self
            .methods
            .iter()
            .map(|&m| {
                let mut line = vec![m.to_string()];
                line.extend(desc.iter().map(|&k| pct(self.mean_predicted(m, k))));
                line
            })
            .collect();
        text.push_str("\nMean predicted annual tracking error (%) by number of stocks\n");
        text.push_str(&render(&header, &body));
        text
    }
}

const REPORT_HEADER: [&str; 7] = ["window_start", "window_end", "method", "k", "fitted_te", "predicted_te", "status"];
const WEIGHTS_HEADER: [&str; 5] = ["window_start", "method", "k", "asset", "weight"];

fn write_records<W: Write>(
    out: W,
    header: &[&str],
    tag: Option<&str>,
    groups: impl IntoIterator<Item = Vec<Vec<String>>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut head: Vec<&str> = tag.into_iter().collect();
    head.extend_from_slice(header);
    w.write_record(&head)?;
    for (g, records) in groups.into_iter().enumerate() {
        for rec in records {
            if tag.is_some() {
                w.write_field(g.to_string())?;
            }
            w.write_record(&rec)?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reports of several panels in one file, with a leading `panel` column.
pub fn write_panels_csv<W: Write>(reports: &[TrackingReport], out: W) -> Result<()> {
    write_records(out, &REPORT_HEADER, Some("panel"), reports.iter().map(|r| r.report_records()))
}

/// Weights of several panels in one file, with a leading `panel` column.
pub fn write_panels_weights_csv<W: Write>(reports: &[TrackingReport], out: W) -> Result<()> {
    write_records(out, &WEIGHTS_HEADER, Some("panel"), reports.iter().map(|r| r.weight_records()))
}

/// Pooled statistics over every window of one or more reports.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingSummary {
    /// `(method, k, mean fitted TE, mean predicted TE, successful fits, failed fits)`.
    pub cells: Vec<(TrackMethod, usize, f64, f64, usize, usize)>,
    /// `(k, share of windows with SSLS predicted TE <= lasso predicted TE, windows compared)`.
    pub ssls_vs_lasso: Vec<(usize, f64, usize)>,
}

impl TrackingSummary {
    pub fn of(reports: &[TrackingReport]) -> TrackingSummary {
        let Some(first) = reports.first() else {
            return TrackingSummary {
                cells: Vec::new(),
                ssls_vs_lasso: Vec::new(),
            };
        };
        let mut cells = Vec::new();
        for &m in &first.methods {
            for &k in &first.k_list {
                let rows = reports.iter().flat_map(|r| &r.rows).filter(|r| r.method == m && r.k == k);
                let ok: Vec<&TrackingFit> = rows.clone().filter_map(|r| r.outcome.as_ref().ok()).collect();
                let failed = rows.count() - ok.len();
                let mean = |f: fn(&TrackingFit) -> f64| {
                    if ok.is_empty() {
                        f64::NAN
                    } else {
                        ok.iter().map(|x| f(x)).sum::<f64>() / ok.len() as f64
                    }
                };
                cells.push((m, k, mean(|f| f.fitted_te), mean(|f| f.predicted_te), ok.len(), failed));
            }
        }
        let mut ssls_vs_lasso = Vec::new();
        if first.methods.contains(&TrackMethod::Ssls) && first.methods.contains(&TrackMethod::Lasso) {
            for &k in &first.k_list {
                let (mut wins, mut total) = (0usize, 0usize);
                for r in reports {
                    for wi in 0..r.windows.len() {
                        let pick = |m| r.get(wi, m, k).and_then(|row| row.outcome.as_ref().ok());
                        if let (Some(a), Some(b)) = (pick(TrackMethod::Ssls), pick(TrackMethod::Lasso)) {
                            total += 1;
                            wins += usize::from(a.predicted_te <= b.predicted_te);
                        }
                    }
                }
                ssls_vs_lasso.push((k, wins as f64 / total.max(1) as f64, total));
            }
        }
        TrackingSummary { cells, ssls_vs_lasso }
    }

    pub fn mean_predicted(&self, method: TrackMethod, k: usize) -> Option<f64> {
        self.cells.iter().find(|c| c.0 == method && c.1 == k).map(|c| c.3)
    }

    pub fn ssls_win_rate(&self, k: usize) -> Option<f64> {
        self.ssls_vs_lasso.iter().find(|c| c.0 == k).map(|c| c.1)
    }

    /// `key = value` lines with full-precision numbers.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (m, k, fitted, predicted, ok, failed) in &self.cells {
            out.push_str(&format!(
                "{m} k={k} mean_fitted_te = {fitted}\n{m} k={k} mean_predicted_te = {predicted}\n{m} k={k} fits = {ok}\n{m} k={k} failed = {failed}\n"
            ));
        }
        for (k, rate, total) in &self.ssls_vs_lasso {
            out.push_str(&format!("k={k} ssls_not_worse_than_lasso = {rate}\nk={k} windows_compared = {total}\n"));
        }
        out
    }
}

fn render(header: &[String], body: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| body.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (s, w))| if c == 0 { format!("{s:<w$}") } else { format!("{s:>w$}") })
            .collect::<Vec<_>>()
            .join(" | ")
    };
    let mut out = line(header);
    out.push('\n');
    out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-|-"));
    out.push('\n');
    for r in body {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}
