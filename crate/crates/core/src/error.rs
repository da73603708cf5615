use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported group family: {0}")]
    UnsupportedFamily(String),

    #[error("group order overflow: {0}")]
    OrderOverflow(String),

    #[error("invalid group table: {0}")]
    InvalidTable(String),

    #[error("no irreducible representation constructor for {0}; use the character table instead")]
    NoIrrepConstructor(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("rounding residue {residue:.3e} exceeds tolerance while computing {what}")]
    Rounding { what: String, residue: f64 },

    #[error("trivial group has no non-trivial irreducible representation")]
    TrivialGroup,

    #[error("invalid generating set: {0}")]
    InvalidGenerators(String),

    #[error("graph too large: {0}")]
    GraphTooLarge(String),

    #[error("walk matrix is not symmetric (max asymmetry {0:.3e})")]
    Asymmetric(f64),

    #[error("labeling is biased: {0}")]
    Biased(String),

    #[error("not pseudo-Cayley: irrep {irrep} entry ({row},{col}) has eigen-residual {residual:.3e} (rayleigh quotient drift {drift:.3e})")]
    NotPseudoCayley { irrep: String, row: usize, col: usize, drift: f64, residual: f64 },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("enumeration too large: {0}")]
    TooLarge(String),

    #[error("no exact evaluation path: {0}")]
    NoExactPath(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
