use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Fock dimension {dim}: at least {min} levels are required")]
    InvalidDimension { dim: usize, min: usize },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kappa2 = {0} is below 0.1; pass an explicit Fock cutoff (the result is cutoff-dependent)")]
    CutoffRequired(f64),

    #[error("steady-state solve failed (residual {residual:.3e})")]
    SolverFailure { residual: f64 },

    #[error("time step {dt} violates the stability guard; use dt <= {max_dt:.3e}")]
    StepSize { dt: f64, max_dt: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Fock level {n} out of range (max {max})")]
    LevelOutOfRange { n: usize, max: usize },

    #[error("quadrature value {0} outside the supported range |X| <= 30")]
    QuadratureOutOfRange(f64),

    #[error("tomogram row normalization failed: measured leakage {leakage:.3e}")]
    Normalization { leakage: f64 },

    #[error("phase-space grid too small: half-extent {extent} < required {required}")]
    GridTooSmall { extent: f64, required: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("negative quadrature variance {0:.3e}")]
    NegativeVariance(f64),

    #[error("ragged grid, missing (detuning, drive) points: {0:?}")]
    RaggedGrid(Vec<(f64, f64)>),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
