use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("mesh validation failed: {0}")]
    MeshValidation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("matrix is singular to working precision at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {defect:e}")]
    NotSymmetric { row: usize, col: usize, defect: f64 },

    #[error("matrix of dimension {n} exceeds the dense limit {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error("no convergence after {iterations} iterations; best residuals {best_residuals:?}")]
    NoConvergence {
        iterations: usize,
        best_residuals: Vec<f64>,
    },

    #[error("shift {sigma} collides with an eigenvalue of the pencil")]
    ShiftCollision { sigma: String },

    #[error("delta = {delta} is at a discrete resonance of the shifted pencil")]
    DiscreteResonance { delta: String },

    #[error(
        "flux compatibility violated: imbalance {imbalance:e} (tolerance {tolerance:e}){context}"
    )]
    Compatibility {
        imbalance: f64,
        tolerance: f64,
        context: String,
    },

    #[error("missing boundary data for role {0}")]
    MissingRole(String),

    #[error("ambiguous branch selection at step {step}: overlaps {best:e} and {second:e}")]
    Ambiguous { step: usize, best: f64, second: f64 },

    #[error("branch is not closed: |first - last| = {defect:e}")]
    NotClosed { defect: f64 },

    #[error("no sign change on ({a}, {b}): m(a) = {fa:e}, m(b) = {fb:e}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("denominator vanishes for index (n={n}, m={m}): {which}")]
    Denominator { n: usize, m: i32, which: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::NoConvergence { .. }
                | Error::ShiftCollision { .. }
                | Error::DiscreteResonance { .. }
                | Error::Compatibility { .. }
                | Error::Ambiguous { .. }
                | Error::NotClosed { .. }
                | Error::NoSignChange { .. }
                | Error::Denominator { .. }
        )
    }
}
