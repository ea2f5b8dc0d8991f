use thiserror::Error;

use crate::fan::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the engine can report. Variant names double as the
/// machine-readable error names printed by the command-line front end.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("the zero vector has no primitive representative")]
    ZeroVector,
    #[error("lattice vector has length {got}, expected rank {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("invalid fan: {0}")]
    InvalidFan(ValidationReport),
    #[error("ray {0} is already a ray of the fan")]
    RayExists(String),
    #[error("vector {0} lies outside the support of the fan")]
    OutsideSupport(String),
    #[error("cone {0} is not a cone of the fan")]
    UnknownCone(String),
    #[error("orbit closure of cone {0} is not complete")]
    NotComplete(String),
    #[error("{0} is not smooth")]
    NotSmooth(String),
    #[error("classes live on different models")]
    ModelMismatch,
    #[error("degree of a point class over a non-complete model is undefined")]
    NonProperDegree,
    #[error("atoms do not form a simple normal crossing configuration: {0}")]
    NotSNC(String),
    #[error("data is not resolved: {0}")]
    NotResolved(String),
    #[error("m_j = {value} on {atom}; every coefficient must exceed -1")]
    NonConvergent { atom: String, value: String },
    #[error("no exceptional divisor lies over the point {0}")]
    EmptyFiber(String),
    #[error("atom {0} has no Chow class on the toric model; use local values")]
    NonToricAtom(String),
    #[error("constructible sets are not disjoint: {0}")]
    NotDisjoint(String),
    #[error("unknown atom: {0}")]
    UnknownAtom(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Name of the variant, e.g. `NonConvergent`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ZeroVector => "ZeroVector",
            Error::RankMismatch { .. } => "RankMismatch",
            Error::InvalidFan(_) => "InvalidFan",
            Error::RayExists(_) => "RayExists",
            Error::OutsideSupport(_) => "OutsideSupport",
            Error::UnknownCone(_) => "UnknownCone",
            Error::NotComplete(_) => "NotComplete",
            Error::NotSmooth(_) => "NotSmooth",
            Error::ModelMismatch => "ModelMismatch",
            Error::NonProperDegree => "NonProperDegree",
            Error::NotSNC(_) => "NotSNC",
            Error::NotResolved(_) => "NotResolved",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::EmptyFiber(_) => "EmptyFiber",
            Error::NonToricAtom(_) => "NonToricAtom",
            Error::NotDisjoint(_) => "NotDisjoint",
            Error::UnknownAtom(_) => "UnknownAtom",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
