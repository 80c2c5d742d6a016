//! Sparse index tracking: price panels, rolling windows, budgeted
//! replication fits and annualized tracking errors.

mod backtest;
mod panel;
mod returns;
mod synthetic;
mod windows;

pub use backtest::{
    backtest, write_panels_csv, write_panels_weights_csv, BacktestConfig, RegressOn, TrackInitial, TrackMethod,
    TrackingFit, TrackingReport, TrackingRow, TrackingSummary,
};
pub use panel::{load_prices, read_prices, write_panel, PricePanel};
pub use returns::{daily_returns, tracking_error, TRADING_DAYS};
pub use synthetic::{synthetic_panel, IndexRule, SyntheticPanel, SyntheticSpec};
pub use windows::{make_windows, BacktestWindow};
