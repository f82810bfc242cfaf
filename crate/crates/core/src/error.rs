use thiserror::Error;

/// Errors surfaced by the workbench, named after the failure they certify.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig}")]
    NotPsd { min_eig: f64 },

    #[error("spectral radius {radius} violates the convergence margin (must be <= {limit})")]
    SpectralRadiusViolation { radius: f64, limit: f64 },

    #[error("precondition violation: {0}")]
    PreconditionViolation(String),

    #[error("elements do not commute: normalized commutator norm {defect}")]
    NotCommuting { defect: f64 },

    #[error("instance generation failed: {0}")]
    GenerationFailure(String),

    #[error("exact attainment unavailable: {0}")]
    AttainmentUnavailable(String),

    #[error("quotient algebra is zero (every block lies in the ideal)")]
    QuotientEmpty,

    #[error("operator is not in the required Sigma set: {0}")]
    NotInSigma(String),

    #[error("factor product does not annihilate the matrix: residual {residual}")]
    NotAnnihilated { residual: f64 },

    #[error("similarity element is numerically singular: {0}")]
    SingularSimilarity(String),

    #[error("theorem violation detected (implementation bug): {0}")]
    TheoremViolation(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
