//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the supported numeric range (e.g. a query
    /// beyond the sieve limit, or a qubit count outside 2..=30).
    #[error("range error: {0}")]
    Range(String),

    /// An argument violated a mathematical precondition (e.g. non-coprime
    /// modulus/residue, Renyi order 1, non-symmetric matrix).
    #[error("domain error: {0}")]
    Domain(String),

    /// Cache or report I/O failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// The LAPACK eigensolver reported a nonzero info code.
    #[error("eigensolver failed: dsyevd info = {0}")]
    Eig(i32),
}

pub type Result<T> = std::result::Result<T, Error>;
