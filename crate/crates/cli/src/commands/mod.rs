mod fit;
mod simulate;
mod track;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ssls::model::MethodTag;
use ssls::simlab::{Covariance, InitialRule, SimDesign, Tuning};

use crate::config::{DesignSection, InitialKind, RunConfig, TuningSection};
use crate::error::CliError;

pub use fit::{cmd_fit, cmd_path};
pub use simulate::{cmd_benchmark, cmd_simulate};
pub use track::cmd_track;

/// Settings shared by every command after flags have overridden the file.
pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
}

impl Context {
    /// Seed precedence: `--seed`, then the section, then the file top level.
    pub fn seed(&self, section: Option<u64>) -> u64 {
        self.seed.or(section).or(self.config.seed).unwrap_or(0)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// Writes one output file through `fill`, then checks it landed.
    fn write(&self, name: &str, fill: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let io_err = |source| CliError::Io {
            path: path.clone(),
            source,
        };
        let file = File::create(&path).map_err(io_err)?;
        let mut out = BufWriter::new(file);
        fill(&mut out)?;
        out.flush().map_err(io_err)?;
        drop(out);
        verify(&path)?;
        Ok(path)
    }

    fn write_text(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        self.write(name, |out| {
            out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: self.path(name),
                source,
            })
        })
    }
}

fn verify(path: &Path) -> Result<(), CliError> {
    match std::fs::metadata(path) {
        Ok(m) if m.is_file() && m.len() > 0 => Ok(()),
        _ => Err(CliError::Unwritten {
            path: path.to_path_buf(),
        }),
    }
}

pub(crate) fn parse_method(name: &str) -> Result<MethodTag, CliError> {
    name.parse::<MethodTag>()
        .map_err(|_| CliError::Invalid(format!("unknown method `{name}`")))
}

pub(crate) fn tuning(section: &TuningSection) -> Result<Tuning, CliError> {
    let t = Tuning {
        gamma: section.gamma,
        lambda2_grid: section.lambda2_grid.clone(),
        lambda1_scale: section.lambda1_scale,
        adaptive_lambda1_scale: section.adaptive_lambda1_scale,
        initial: match section.initial {
            InitialKind::Lasso => InitialRule::Lasso,
            InitialKind::Marginal => InitialRule::Marginal,
        },
    };
    t.validate()?;
    Ok(t)
}

pub(crate) fn design(section: &DesignSection, seed: u64) -> Result<SimDesign, CliError> {
    let cov: Covariance = section.covariance.parse()?;
    let d = SimDesign::with_leading(section.n, section.p, &section.beta, section.sigma, cov, seed)?;
    d.validate()?;
    Ok(d)
}

/// `key = value` lines, full precision.
pub(crate) fn summary(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}
