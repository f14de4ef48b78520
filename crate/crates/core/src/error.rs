use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where the model formula is defined.
    #[error("{quantity} = {value} is outside the valid domain ({expected})")]
    Domain {
        quantity: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// Walfisch-Bertoni curvature term `1 - d²/(17·Δh_tx)` is non-positive.
    #[error("distance {d_km} km is beyond the Walfisch-Bertoni limit of {limit_km:.6} km")]
    Curvature { d_km: f64, limit_km: f64 },

    /// Several measurement distances violate the Walfisch-Bertoni domain.
    #[error("{} distance(s) beyond the Walfisch-Bertoni limit of {limit_km:.6} km: {distances:?}", distances.len())]
    CurvatureSet { distances: Vec<f64>, limit_km: f64 },

    #[error("series lengths differ: {predicted} predicted vs {measured} measured")]
    LengthMismatch { predicted: usize, measured: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite value {value} at sample {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("singular value decomposition did not converge")]
    NoConvergence,

    #[error("invalid config: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            quantity,
            value,
            expected,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
