use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix does not have full row rank (rank {rank}, rows {rows})")]
    Rank { rank: usize, rows: usize },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("polynomial is not invertible modulo the given modulus")]
    NotInvertible,
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("syndrome has no coset leader of weight at most t")]
    DecodeFailure,
    #[error("word is not a codeword of the pre-code")]
    NotACodeword,
    #[error("key mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("state is not normalized (norm² = {0})")]
    Norm(f64),
    #[error("source and destination register must differ")]
    SameRegister,
    #[error("register {0} is not zero across the support")]
    ResidueNonzero(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dim(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
