use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error in {}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("missing input file: {}", path.display())]
    MissingInput { path: PathBuf },
    #[error("no [{section}] section in the config")]
    MissingSection { section: &'static str },
    #[error("invalid setting: {0}")]
    Invalid(String),
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("output {} was not written", path.display())]
    Unwritten { path: PathBuf },
    #[error(transparent)]
    Core(#[from] ssls::Error),
}

impl CliError {
    /// Short machine-readable category printed before the message.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config",
            CliError::MissingInput { .. } => "missing_input",
            CliError::MissingSection { .. } => "config",
            CliError::Invalid(_) => "invalid",
            CliError::Io { .. } => "io",
            CliError::Unwritten { .. } => "output",
            CliError::Core(_) => "solver",
        }
    }
}
