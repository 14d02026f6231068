use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("partition sizes sum to {sum} but the matrix has order {order}")]
    SizeMismatch { sum: usize, order: usize },
    #[error("partition must have at least one block and every block size must be positive")]
    InvalidPartition,
    #[error("block index ({i}, {j}) out of range for {n} blocks (indices are 1-based)")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("diagonal block {index} is not square")]
    NonSquareBlock { index: usize },
    #[error("matrix is not Hurwitz")]
    NotHurwitz,
    #[error("matrix is not Metzler")]
    NotMetzler,
    #[error("{0} did not converge")]
    IterationFailure(&'static str),
    #[error("iteration budget of {0} exceeded")]
    IterationBudgetExceeded(usize),
    #[error("linear solve failed: {0}")]
    SolverFailure(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("test C requires scalings from a Hurwitz comparison matrix")]
    MissingScalings,
    #[error("block comparison matrix is not Hurwitz")]
    ComparisonNotHurwitz,
    #[error("Riccati equation for block {block} has no stabilizing positive-definite solution")]
    RiccatiFailure { block: usize },
    #[error("invalid coupling weights: {0}")]
    InvalidGamma(String),
    #[error("block ({i}, {j}) is nonzero; matrix is not border block diagonal")]
    NotBorderBlockDiagonal { i: usize, j: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// `true` for malformed or inconsistent input, as opposed to a numerical
    /// breakdown on well-formed input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NonSquare { .. }
                | Error::Empty
                | Error::NonFinite
                | Error::DimensionMismatch(_)
                | Error::SizeMismatch { .. }
                | Error::InvalidPartition
                | Error::IndexOutOfRange { .. }
                | Error::NonSquareBlock { .. }
                | Error::InvalidGamma(_)
                | Error::NotBorderBlockDiagonal { .. }
        )
    }
}
