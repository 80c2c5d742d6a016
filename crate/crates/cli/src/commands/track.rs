use ssls::tracking::{
    backtest, load_prices, synthetic_panel, write_panel, write_panels_csv, write_panels_weights_csv, BacktestConfig,
    SyntheticSpec, TrackMethod, TrackingSummary,
};

use super::Context;
use crate::config::require_file;
use crate::error::CliError;

/// Rolling-window tracking backtest on a panel file or on synthetic panels.
pub fn cmd_track(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config.track.as_ref().ok_or(CliError::MissingSection { section: "track" })?;
    let bt = BacktestConfig {
        n_train: cfg.n_train,
        n_test: cfg.n_test,
        stride: cfg.stride.unwrap_or(cfg.n_test),
        k_list: cfg.k_list.clone(),
        methods: cfg
            .methods
            .iter()
            .map(|m| m.parse::<TrackMethod>())
            .collect::<Result<Vec<_>, _>>()?,
        gamma: cfg.gamma,
        lambda2: cfg.lambda2,
        regress_on: cfg.regress_on.parse()?,
        initial: cfg.initial.parse()?,
    };
    let panels = match (&cfg.panel, &cfg.synthetic) {
        (Some(path), None) => {
            require_file(path)?;
            vec![load_prices(path)?]
        }
        (None, Some(syn)) => {
            if syn.panels == 0 {
                return Err(CliError::Invalid("synthetic.panels must be at least 1".into()));
            }
            let spec = SyntheticSpec {
                t: syn.t,
                p: syn.p,
                holdings: syn.holdings,
                noise_sd: syn.noise_sd,
                market_vol: syn.market_vol,
                idio_vol: syn.idio_vol,
                rule: syn.rule.parse()?,
                seed: ctx.seed(cfg.seed),
            };
            (0..syn.panels as u64)
                .map(|r| synthetic_panel(&spec, r).map(|s| s.panel))
                .collect::<Result<Vec<_>, _>>()?
        }
        _ => {
            return Err(CliError::Invalid(
                "track needs exactly one of `panel` or a [track.synthetic] table".into(),
            ))
        }
    };
    let reports = panels
        .iter()
        .map(|p| backtest(p, &bt))
        .collect::<Result<Vec<_>, _>>()?;
    if let [report] = reports.as_slice() {
        ctx.write("tracking.csv", |out| Ok(report.write_csv(out)?))?;
        ctx.write("weights.csv", |out| Ok(report.write_weights_csv(out)?))?;
        if cfg.synthetic.is_some() {
            ctx.write("panel.csv", |out| Ok(write_panel(&panels[0], out)?))?;
        }
    } else {
        ctx.write("tracking.csv", |out| Ok(write_panels_csv(&reports, out)?))?;
        ctx.write("weights.csv", |out| Ok(write_panels_weights_csv(&reports, out)?))?;
    }
    ctx.write_text("tracking.txt", &reports[0].to_text_table())?;
    ctx.write_text("tracking_summary.txt", &TrackingSummary::of(&reports).to_text())?;
    Ok(())
}
