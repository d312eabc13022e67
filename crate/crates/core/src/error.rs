use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivideByZero,
    #[error("polynomial division leaves a remainder")]
    NotDivisible,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("bad dimension {0}")]
    BadDimension(usize),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("bad indices ({0}, {1})")]
    BadIndices(usize, usize),
    #[error("unknown case {0}")]
    BadCase(String),
    #[error("explicit determinant of size {0} exceeds the supported bound")]
    ExplicitTooLarge(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("not a probability distribution: {0}")]
    BadDistribution(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
