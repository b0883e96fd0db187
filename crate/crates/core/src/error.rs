use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field of order {p}^{r} exceeds the 2^16 cap")]
    FieldTooLarge { p: u64, r: u32 },
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("{count} subspaces requested, cap is {cap}")]
    TooManySubspaces { count: u128, cap: u128 },
    #[error("resource cap exceeded: {0}")]
    ResourceCapExceeded(String),
    #[error("group of order {order} exceeds cap {cap}")]
    GroupTooLarge { order: u128, cap: u128 },
    #[error("too many flags in dimension {dim}: cap {cap}")]
    TooManyFlags { dim: usize, cap: usize },
    #[error("face identity d_{i} d_{j} = d_{jm1} d_{i} fails on simplex {simplex} of level {level}", jm1 = .j - 1)]
    FaceIdentityViolation { level: usize, simplex: usize, i: usize, j: usize },
    #[error("map is not order preserving: {0} < {1} but images are not ordered")]
    NotMonotone(usize, usize),
    #[error("hypothesis ({which}) failed{}", .at.map(|y| format!(" at element {y}")).unwrap_or_default())]
    HypothesisFailed { which: String, at: Option<usize> },
    #[error("building too large: {0}")]
    TooLarge(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("group action mismatch: {0}")]
    ActionMismatch(String),
    #[error("chains exist above the top dimension {0}")]
    TopChainAboveTop(usize),
    #[error("modules are over different groups")]
    GroupMismatch,
    #[error("window too large: {0}")]
    WindowTooLarge(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("budget exceeded after {0} checks")]
    BudgetExceeded(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
