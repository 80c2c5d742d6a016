use ssls::rng::child_seed;
use ssls::simlab::{
    consistency_curve, contrast_paths, error_decay, generate_replication, normality_diag, path_contrast, run_benchmark,
    write_path_csv, NormalityTarget, PathSettings, BENCHMARK_METHODS,
};

use super::{design, parse_method, summary, tuning, Context};
use crate::config::{Experiment, NormalityTargetKind};
use crate::error::CliError;

fn csv_err(e: csv::Error) -> CliError {
    CliError::Core(e.into())
}

/// Runs one Monte-Carlo experiment selected by `experiment`.
pub fn cmd_simulate(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx
        .config
        .simulate
        .as_ref()
        .ok_or(CliError::MissingSection { section: "simulate" })?;
    let base = design(&cfg.design(), ctx.seed(cfg.seed))?;
    let tuning = tuning(&cfg.tuning)?;
    let reps = cfg.replications;
    let grid = || {
        if cfg.n_grid.is_empty() {
            Err(CliError::Invalid(format!("{:?} needs a non-empty n_grid", cfg.experiment).to_lowercase()))
        } else {
            Ok(cfg.n_grid.clone())
        }
    };
    match cfg.experiment {
        Experiment::Consistency => {
            let method = parse_method(&cfg.method)?;
            let points = consistency_curve(&base, &grid()?, reps, &tuning, method)?;
            ctx.write("consistency.csv", |out| {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["n", "accuracy", "se", "completed", "failed"]).map_err(csv_err)?;
                for pt in &points {
                    w.write_record([
                        pt.n.to_string(),
                        pt.accuracy.to_string(),
                        pt.se.to_string(),
                        pt.completed.to_string(),
                        pt.failed.to_string(),
                    ])
                    .map_err(csv_err)?;
                }
                w.flush().map_err(|e| csv_err(e.into()))
            })?;
        }
        Experiment::Decay => {
            let points = error_decay(&base, &grid()?, reps, &tuning)?;
            ctx.write("decay.csv", |out| {
                let mut w = csv::Writer::from_writer(out);
                w.write_record([
                    "n",
                    "aen_bias2",
                    "aen_mse",
                    "ssls_bias2",
                    "ssls_mse",
                    "ssls_mse_se",
                    "oracle_mse",
                    "accuracy",
                    "completed",
                    "failed",
                ])
                .map_err(csv_err)?;
                for pt in &points {
                    w.write_record([
                        pt.n.to_string(),
                        pt.aen_bias2.to_string(),
                        pt.aen_mse.to_string(),
                        pt.ssls_bias2.to_string(),
                        pt.ssls_mse.to_string(),
                        pt.ssls_mse_se.to_string(),
                        pt.oracle_mse.to_string(),
                        pt.accuracy.to_string(),
                        pt.completed.to_string(),
                        pt.failed.to_string(),
                    ])
                    .map_err(csv_err)?;
                }
                w.flush().map_err(|e| csv_err(e.into()))
            })?;
        }
        Experiment::Normality => {
            let target = match cfg.target {
                NormalityTargetKind::Ssls => NormalityTarget::Ssls,
                NormalityTargetKind::AdaptiveElasticNet => NormalityTarget::AdaptiveElasticNet,
            };
            let report = normality_diag(&base, reps, &cfg.alpha, &tuning, target)?;
            ctx.write("normality.csv", |out| {
                writeln!(out, "draw,statistic")
                    .and_then(|_| {
                        report
                            .sample
                            .iter()
                            .enumerate()
                            .try_for_each(|(i, v)| writeln!(out, "{i},{v}"))
                    })
                    .map_err(|source| CliError::Io {
                        path: "normality.csv".into(),
                        source,
                    })
            })?;
            let band = if report.retained() > 0 { report.ks_band() } else { f64::NAN };
            ctx.write_text(
                "normality_summary.txt",
                &summary(&[
                    ("design", base.label()),
                    ("replications", report.replications.to_string()),
                    ("retained", report.retained().to_string()),
                    ("mean", report.mean.to_string()),
                    ("variance", report.variance.to_string()),
                    ("ks", report.ks.to_string()),
                    ("ks_band", band.to_string()),
                ]),
            )?;
        }
        Experiment::Figure1 => {
            let settings = PathSettings {
                lambda2: cfg.path_lambda2,
                gamma: cfg.path_gamma,
            };
            let report = path_contrast(&base, reps, settings)?;
            ctx.write("figure1_hits.csv", |out| {
                writeln!(out, "replication,aen_hit,lasso_hit")
                    .and_then(|_| {
                        report.hits.iter().enumerate().try_for_each(|(r, h)| match h {
                            Some((a, l)) => writeln!(out, "{r},{a},{l}"),
                            None => writeln!(out, "{r},failed,failed"),
                        })
                    })
                    .map_err(|source| CliError::Io {
                        path: "figure1_hits.csv".into(),
                        source,
                    })
            })?;
            ctx.write_text(
                "figure1_summary.txt",
                &summary(&[
                    ("design", base.label()),
                    ("replications", report.replications.to_string()),
                    ("failed", report.failed().to_string()),
                    ("aen_true_support_rate", report.aen_rate().to_string()),
                    ("lasso_true_support_rate", report.lasso_rate().to_string()),
                ]),
            )?;
            let (ds, _) = generate_replication(&base, 0)?;
            let (aen, lasso) = contrast_paths(&ds, settings)?;
            ctx.write("figure1_aen_path.csv", |out| Ok(write_path_csv(&aen, out)?))?;
            ctx.write("figure1_lasso_path.csv", |out| Ok(write_path_csv(&lasso, out)?))?;
        }
    }
    Ok(())
}

/// Five-method loss benchmark over the configured designs.
pub fn cmd_benchmark(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx
        .config
        .benchmark
        .as_ref()
        .ok_or(CliError::MissingSection { section: "benchmark" })?;
    if cfg.designs.is_empty() {
        return Err(CliError::Invalid("benchmark needs at least one [[benchmark.designs]] entry".into()));
    }
    let seed = ctx.seed(cfg.seed);
    let designs = cfg
        .designs
        .iter()
        .enumerate()
        .map(|(i, d)| design(d, child_seed(seed, i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let methods = match &cfg.methods {
        Some(names) => names.iter().map(|m| parse_method(m)).collect::<Result<Vec<_>, _>>()?,
        None => BENCHMARK_METHODS.to_vec(),
    };
    let report = run_benchmark(&designs, &methods, &tuning(&cfg.tuning)?, cfg.replications)?;
    ctx.write("benchmark.csv", |out| Ok(report.write_csv(out)?))?;
    ctx.write_text("benchmark.txt", &report.to_text_table())?;
    Ok(())
}
