use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The operation needs every pointer particle to share one velocity pair (+Ξ, −Ξ).
    #[error("operation requires single-pointer mode: {0}")]
    Mode(String),

    /// |Ψ|² divided by the larger branch intensity fell below the node epsilon.
    #[error("configuration is too close to a node (normalized density {density:e})")]
    Node { density: f64 },

    #[error("non-finite state at t'={t_prime}")]
    NonFinite { t_prime: f64 },

    #[error("trajectory too short: ends at t'={t_end}, needs at least t'={required}")]
    TooShort { t_end: f64, required: f64 },

    #[error("threshold {threshold} never reached for N={n} before t'={t_end}")]
    ThresholdNotReached { threshold: f64, n: usize, t_end: f64 },

    #[error("{0}")]
    InvalidInput(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("scenario parse error: {0}")]
    ScenarioParse(#[from] toml::de::Error),

    #[error("scenario serialize error: {0}")]
    ScenarioSerialize(#[from] toml::ser::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad configuration rather than by the dynamics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::Mode(_)
                | Error::InvalidInput(_)
                | Error::ScenarioParse(_)
                | Error::ScenarioSerialize(_)
        )
    }
}
