use thiserror::Error;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{n_sites} sites need {required_bytes} bytes for a dense operator, budget is {budget_bytes} bytes")]
    Resource {
        n_sites: usize,
        required_bytes: u128,
        budget_bytes: u128,
    },

    #[error("operator is not Hermitian: max |M - M^dag| = {defect:e}")]
    NotHermitian { defect: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver failed to converge")]
    Eigensolver,

    #[error("observable has zero range (proportional to the identity)")]
    DegenerateObservable,

    #[error("no dynamics: {0}")]
    NoDynamics(String),

    #[error("energy density is degenerate (sigma_E = 0)")]
    DegenerateDensity,

    #[error("gap set is not symmetric: mean gap {mean:e}")]
    GapAsymmetry { mean: f64 },

    #[error("frequency grid does not cover gaps {uncovered:?}")]
    GridCoverage { uncovered: Vec<f64> },

    #[error("no valid coarse-graining width: spacing {spacing:e} vs inverse Lipschitz bound {upper:e}")]
    NoValidEpsilon { spacing: f64, upper: f64 },

    #[error("omega/J = {ratio} is outside the validity domain omega/J > alpha = {alpha}")]
    OutsideValidity { ratio: f64, alpha: f64 },

    #[error("no band weight above omega = {0}")]
    NoBandWeight(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Resource { .. } => "resource",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Eigensolver => "eigensolver",
            Error::DegenerateObservable => "degenerate_observable",
            Error::NoDynamics(_) => "no_dynamics",
            Error::DegenerateDensity => "degenerate_density",
            Error::GapAsymmetry { .. } => "gap_asymmetry",
            Error::GridCoverage { .. } => "grid_coverage",
            Error::NoValidEpsilon { .. } => "no_valid_epsilon",
            Error::OutsideValidity { .. } => "outside_validity",
            Error::NoBandWeight(_) => "no_band_weight",
            Error::Domain(_) => "domain",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
