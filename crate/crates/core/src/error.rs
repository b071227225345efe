use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    /// A point or parameter lies outside the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("kernel singularity at coincident points {0:?}")]
    Singularity(Vec<f64>),

    #[error("singular coefficient: p vanishes at {0:?}")]
    SingularCoefficient(Vec<f64>),

    #[error("target cell is unreachable from the source in the grid domain")]
    Unreachable,

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (last update {last_update:.3e})")]
    Divergence {
        iterations: usize,
        last_update: f64,
        history: Vec<f64>,
    },

    #[error("hypothesis violated: {reason} ({} failing samples)", .samples.len())]
    Hypothesis { reason: String, samples: Vec<Vec<f64>> },

    #[error("non-finite value {value} at {location:?}")]
    NonFinite { value: f64, location: Vec<f64> },

    #[error("finite-difference step fell below the minimum at {0:?}")]
    StepTooSmall(Vec<f64>),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl LabError {
    pub fn domain(msg: impl Into<String>) -> Self {
        LabError::Domain(msg.into())
    }

    pub fn hypothesis(reason: impl Into<String>, samples: Vec<Vec<f64>>) -> Self {
        LabError::Hypothesis {
            reason: reason.into(),
            samples,
        }
    }
}
