use ssls::model::{standardize, CoefficientVector, Dataset, FitResult, MethodTag, PenaltySpec, StandardizeOptions};
use ssls::solvers::{
    adaptive_weights, fit_with_moments, initial_estimator_with_moments, penalized_path, LarsOptions, Moments,
    NoiseLevel,
};
use ssls::simlab::write_path_csv;
use ssls::ssls::{fit_ssls_with_moments, Selector, SslsConfig};

use super::{parse_method, summary, Context};
use crate::config::{require_file, InitialKind};
use crate::error::CliError;

fn initial(ds: &Dataset, moments: &Moments, kind: InitialKind, sigma: Option<f64>) -> Result<CoefficientVector, CliError> {
    Ok(match kind {
        InitialKind::Lasso => {
            let level = sigma.map_or(NoiseLevel::Auto, NoiseLevel::Known);
            initial_estimator_with_moments(ds, moments, level)?
        }
        InitialKind::Marginal => CoefficientVector::new(&moments.xty / ds.n() as f64),
    })
}

fn load(path: &std::path::Path, standardized: bool) -> Result<(Dataset, Dataset, Option<ssls::model::Standardization>), CliError> {
    require_file(path)?;
    let raw = Dataset::read_csv(path)?;
    if standardized {
        let (ds, record) = standardize(&raw, StandardizeOptions::default())?;
        Ok((raw, ds, Some(record)))
    } else {
        Ok((raw.clone(), raw, None))
    }
}

/// Fits one penalized model or the two-stage estimator and writes
/// `coefficients.csv`, `support.csv` and `fit_summary.txt`.
pub fn cmd_fit(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config.fit.as_ref().ok_or(CliError::MissingSection { section: "fit" })?;
    let method = parse_method(&cfg.method)?;
    let (raw, ds, record) = load(&cfg.data, cfg.standardize)?;
    let moments = Moments::new(&ds);
    let lambda1 = match (cfg.lambda1, cfg.k) {
        (Some(l), _) => l,
        (None, Some(_)) => 0.0,
        (None, None) => return Err(CliError::Invalid("fit needs lambda1 or a support budget k".into())),
    };
    let needs_init = matches!(
        method,
        MethodTag::AdaptiveLasso | MethodTag::AdaptiveElasticNet | MethodTag::Ssls
    );
    let init = if needs_init {
        initial(&ds, &moments, cfg.initial, cfg.sigma)?
    } else {
        CoefficientVector::zeros(ds.p())
    };
    let mut lambda2 = cfg.lambda2;
    let fit: FitResult = match method {
        MethodTag::Ssls => {
            let mut sc = SslsConfig::new(Selector::AdaptiveElasticNet, lambda1, cfg.lambda2, cfg.gamma, &init)?;
            if let Some(k) = cfg.k {
                sc = sc.with_k_target(k);
            }
            fit_ssls_with_moments(&ds, &moments, &sc)?.refit
        }
        MethodTag::Ols => {
            lambda2 = 0.0;
            ssls::ssls::ols_refit(&ds, &ssls::model::SupportSet::new((0..ds.p()).collect(), ds.p())?)?
        }
        m => {
            if cfg.k.is_some() {
                return Err(CliError::Invalid("a support budget k is only supported by method ssls".into()));
            }
            let selector: Selector = m.as_str().parse()?;
            let sc = SslsConfig::new(selector, lambda1, cfg.lambda2, cfg.gamma, &init)?;
            lambda2 = sc.penalty.lambda2;
            fit_with_moments(&ds, &moments, &sc.penalty)?
        }
    };
    let (beta, intercept) = match &record {
        Some(r) => r.to_original(&fit.beta),
        None => (fit.beta.clone(), 0.0),
    };
    ctx.write("coefficients.csv", |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "name", "value"]).map_err(ssls::Error::from)?;
        for j in 0..raw.p() {
            w.write_record([j.to_string(), raw.column_name(j), beta.get(j).to_string()])
                .map_err(ssls::Error::from)?;
        }
        w.flush().map_err(|e| ssls::Error::from(csv::Error::from(e)))?;
        Ok(())
    })?;
    let support = beta.support();
    ctx.write("support.csv", |out| {
        writeln!(out, "index,name").and_then(|_| {
            support
                .iter()
                .try_for_each(|&j| writeln!(out, "{j},{}", raw.column_name(j)))
        })
        .map_err(|source| CliError::Io {
            path: "support.csv".into(),
            source,
        })
    })?;
    let text = summary(&[
        ("method", method.as_str().to_string()),
        ("lambda1", lambda1.to_string()),
        ("lambda2", lambda2.to_string()),
        ("gamma", cfg.gamma.to_string()),
        ("k", cfg.k.map_or_else(|| "none".into(), |k| k.to_string())),
        ("standardized", cfg.standardize.to_string()),
        ("intercept", intercept.to_string()),
        ("support_size", support.len().to_string()),
        ("objective", fit.objective.to_string()),
        ("kkt_max_violation", fit.kkt_max_violation.to_string()),
    ]);
    ctx.write_text("fit_summary.txt", &text)?;
    Ok(())
}

/// Writes the full regularization path of a lasso-type method to `path.csv`.
pub fn cmd_path(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config.path.as_ref().ok_or(CliError::MissingSection { section: "path" })?;
    let method = parse_method(&cfg.method)?;
    let selector: Selector = method
        .as_str()
        .parse()
        .map_err(|_| CliError::Invalid(format!("method `{}` has no regularization path", cfg.method)))?;
    let (_, ds, _) = load(&cfg.data, cfg.standardize)?;
    let moments = Moments::new(&ds);
    let weights = if selector.is_adaptive() {
        adaptive_weights(&initial(&ds, &moments, cfg.initial, cfg.sigma)?, cfg.gamma)
    } else {
        vec![1.0; ds.p()]
    };
    let lambda2 = if selector.uses_ridge() { cfg.lambda2 } else { 0.0 };
    PenaltySpec {
        lambda1: 0.0,
        lambda2,
        gamma: cfg.gamma,
        weights: weights.clone(),
    }
    .validate()?;
    let opts = LarsOptions {
        max_support: cfg.max_support,
        ..LarsOptions::full(ds.p(), ds.n())
    };
    let path = penalized_path(&moments, lambda2, &weights, &opts)?;
    ctx.write("path.csv", |out| Ok(write_path_csv(&path, out)?))?;
    ctx.write_text(
        "path_summary.txt",
        &summary(&[
            ("method", method.as_str().to_string()),
            ("lambda2", lambda2.to_string()),
            ("breakpoints", path.len().to_string()),
            ("max_support", path.max_support_size().to_string()),
        ]),
    )?;
    Ok(())
}
