use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix could not be factorised or inverted.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Parameters for which the worst-case constraint has no solution.
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
