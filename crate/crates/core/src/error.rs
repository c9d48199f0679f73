use thiserror::Error;

/// Which open-cell condition an element failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellCondition {
    /// The lower-right SL(2) entry vanishes.
    Sl2Corner,
    /// The image of the isotropic vector e_{n+1} - e_{n+2} is not transverse.
    LorentzBoundary,
}

impl std::fmt::Display for CellCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CellCondition::Sl2Corner => write!(f, "SL(2) entry d = 0"),
            CellCondition::LorentzBoundary => write!(f, "w_(n+1) - w_(n+2) <= 0"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("invalid variable index {0}")]
    InvalidVariable(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid catalogue key: {0}")]
    InvalidKey(String),

    #[error("{what} violates group invariants (deviation {deviation:e})")]
    NotInGroup { what: &'static str, deviation: f64 },

    #[error("factor is not in subgroup {0}")]
    NotInSubgroup(&'static str),

    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("element outside the open Bruhat cell ({0})")]
    OutsideCell(CellCondition),

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("outside domain: {0}")]
    OutsideDomain(String),

    #[error("algebra element outside the modelled span: {0}")]
    OutsideSpan(String),

    #[error("polynomial is not harmonic")]
    NotHarmonic,

    #[error("element rejected: {0}")]
    RejectedElement(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
