use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian positive semidefinite: {0}")]
    NotPsd(String),

    #[error("matrix is not unitary (residual {residual:.3e} > tolerance {tol:.1e})")]
    NonUnitary { residual: f64, tol: f64 },

    #[error("invalid photon input pair ({0}, {1})")]
    InvalidPair(usize, usize),

    #[error("too many modes: {0} (simulator supports at most {max})", max = crate::gatemap::MAX_MODES)]
    TooManyModes(usize),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("sign branch {0:?} does not satisfy the branch constraint (residual {1:.3e})")]
    InvalidBranch([i8; 4], f64),

    #[error("weight w{0} is (numerically) zero; use the zero-weight construction")]
    ZeroWeight(usize),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("free parameters must be nonzero")]
    ZeroParameter,

    #[error("no weight vanishes; the zero-weight construction does not apply")]
    NotZeroCase,

    #[error("gate is not achievable with two photons, linear optics and post-selection")]
    NotAchievable,

    #[error("matrix is not a contraction (largest singular value {0:.6})")]
    NotContraction(f64),

    #[error("post-selected block is not proportional to the target (residual {0:.3e})")]
    NotProportional(f64),

    #[error("optimizer did not converge from any start")]
    NoConvergence,

    #[error("malformed network: {0}")]
    MalformedNetwork(String),

    #[error("parse error: {0}")]
    Parse(String),
}
