use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rank {n} for affine label {label}")]
    InvalidRank { label: String, n: usize },

    #[error("invalid node {node} (nodes are 1..={rank})")]
    InvalidNode { node: usize, rank: usize },

    #[error("spectral point (kappa = {kappa}, lambda = {lambda}) has no r-th roots on the lattice")]
    RootInadmissible { kappa: u32, lambda: String },

    #[error("operation requires a twisted type")]
    NotTwisted,

    #[error("monomial is not dominant: {0}")]
    NotDominant(String),

    #[error("non-integral level in {0}")]
    NonIntegralLevel(String),

    #[error("level outside [0, {ell}] in {monomial}")]
    LevelOutOfRange { monomial: String, ell: i64 },

    #[error("right/left negativity is undefined for the identity monomial")]
    IdentityMonomial,

    #[error("operation is only defined for sl2-hat monomials: {0}")]
    NotSl2(String),

    #[error("negative multiplicity {coeff} at {monomial} during triangular decomposition")]
    NegativeMultiplicity { monomial: String, coeff: i64 },

    #[error("nonzero residual without dominant monomial: {0}")]
    InconsistentResidual(String),

    #[error("ambiguous l-weight spectrum: {0}")]
    AmbiguousSpectrum(String),

    #[error("candidate monomials do not cover the spectrum: {0}")]
    UncoveredSpectrum(String),

    #[error("module is not thin (block {monomial} has dimension {dim})")]
    NotThin { monomial: String, dim: usize },

    #[error("self-check failed: {0}")]
    SelfCheck(String),

    #[error("validation failed for {entry}: {reason}")]
    Validation { entry: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidRank { .. } => "invalid-rank",
            Error::InvalidNode { .. } => "invalid-node",
            Error::RootInadmissible { .. } => "root-inadmissible",
            Error::NotTwisted => "not-twisted",
            Error::NotDominant(_) => "not-dominant",
            Error::NonIntegralLevel(_) => "non-integral-level",
            Error::LevelOutOfRange { .. } => "level-out-of-range",
            Error::IdentityMonomial => "identity-monomial",
            Error::NotSl2(_) => "not-sl2",
            Error::NegativeMultiplicity { .. } => "negative-multiplicity",
            Error::InconsistentResidual(_) => "inconsistent-residual",
            Error::AmbiguousSpectrum(_) => "ambiguous-spectrum",
            Error::UncoveredSpectrum(_) => "uncovered-spectrum",
            Error::NotThin { .. } => "not-thin",
            Error::SelfCheck(_) => "self-check",
            Error::Validation { .. } => "validation",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Internal(_) => "internal",
        }
    }
}
