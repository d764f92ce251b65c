use thiserror::Error;

/// Errors shared across the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric (max asymmetry {asym:.3e} > tol {tol:.3e})")]
    NotSymmetric { asym: f64, tol: f64 },

    #[error("matrix is not skew-adjoint in the required sense: {0}")]
    NotSkewAdjoint(String),

    #[error("cutoff {cutoff} is within gap tolerance {gap_tol} of the spectrum")]
    InadmissibleCutoff { cutoff: f64, gap_tol: f64 },

    #[error("structure map check failed: {0}")]
    StructureViolation(String),

    #[error("operator is not {ell}-adapted: {reason}")]
    NotAdapted { ell: u8, reason: String },

    #[error("potential violates the adaptedness constraint: {0}")]
    BadPotential(String),

    #[error("degenerate pairing: {0}")]
    DegeneratePairing(String),

    #[error("singular map where an isomorphism was required: {0}")]
    SingularMap(String),

    #[error("subspace is not Lagrangian: {0}")]
    NotLagrangian(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("torsor group mismatch: {0}")]
    GroupMismatch(String),

    #[error("intertwiner construction failed: {0}")]
    Intertwiner(String),

    #[error("path transport failed: {0}")]
    Transport(String),

    #[error("grading mismatch: indices {0} and {1} differ, no torsor morphism exists")]
    GradingMismatch(String, String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
