use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gcd(0, 0) is undefined")]
    ZeroGcd,
    #[error("modulus must be nonzero")]
    ZeroModulus,
    #[error("{0} has no inverse modulo {1}")]
    NotInvertible(String, String),
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("norm {norm} exceeds the supported limit {limit}")]
    TooLarge { norm: u128, limit: u128 },
    #[error("integer overflow in Gaussian arithmetic")]
    Overflow,
    #[error("pole at s = 1 (residue {residue})")]
    Pole { residue: f64 },
    #[error("out of domain: {0}")]
    Domain(String),
    #[error("precision not reached: {0}")]
    Precision(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
