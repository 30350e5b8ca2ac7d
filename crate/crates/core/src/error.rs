use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a formula or mapping.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// The one-electron-per-region sector carries (numerically) no weight.
    #[error("no support in the one-per-region sector (weight {weight:.3e})")]
    NoSectorSupport { weight: f64 },

    #[error("krylov step failed to converge: residual estimate {residual:.3e} exceeds {tolerance:.1e}")]
    KrylovBreakdown { residual: f64, tolerance: f64 },

    #[error("exact propagation needs dimension {dim}, above the configured limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable class used by the command-line front end.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidState(_) | Error::InvalidPartition(_) => "input",
            Error::NoSectorSupport { .. } => "sector",
            Error::KrylovBreakdown { .. } | Error::TooLarge { .. } => "simulation",
            Error::UnknownStrategy { .. } | Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) | Error::Csv(_) => "format",
        }
    }
}
