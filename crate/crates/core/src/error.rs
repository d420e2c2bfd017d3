use std::path::PathBuf;

use crate::ode::OdeError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("inadmissible foliation parameters: {0}")]
    InvalidParams(String),

    #[error("{quantity} is undefined at {value} (domain {domain})")]
    Domain {
        quantity: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("integrator fault: {0}")]
    Integrator(#[from] OdeError),

    #[error("bracket initialization failed: {0}")]
    BracketInit(String),

    #[error("search did not converge: orthogonality defect {defect:e} exceeds {tolerance:e}")]
    NonConvergence { defect: f64, tolerance: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("I/O error on {path}: {source}", path = path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
