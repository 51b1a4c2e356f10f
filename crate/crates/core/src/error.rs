//! Engine errors.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("idealized index {0} out of range 1..={1}")]
    IdealizedOutOfRange(usize, usize),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("polynomial over the wrong variable set (expected {expected} variables, got {got})")]
    WrongVariableSet { expected: usize, got: usize },
    #[error("cannot invert idealized log direction t{0}")]
    InvertIdealized(usize),
    #[error("generator is not a squarefree monomial in the log coordinates")]
    NotSquarefreeMonomial,
    #[error("negative Ext index")]
    NegativeExtIndex,
    #[error("stratum component invalid for this chart")]
    BadStratumComponent,
    #[error("split_by_support hypothesis violated: Ch(M) not contained in V(Z) ∪ T*X|_Xk")]
    SplitHypothesis,
    #[error("split_by_support found no exponent n <= {0}")]
    SplitExponentExceeded(usize),
    #[error("free resolution exceeded the length cap {0}")]
    ResolutionTooLong(usize),
    #[error("operation requires a left, non-localized module")]
    SideOrLocalization,
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Analysis(String),
}

impl Error {
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::UnknownGenerator(_) | Error::WrongVariableSet { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
