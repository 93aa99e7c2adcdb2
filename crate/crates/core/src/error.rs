use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeisError {
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} has norm divisible by 3 and no primary associate")]
    NotCoprimeToThree(String),
    #[error("{0} is not a prime congruent to 1 mod 3")]
    NotSplitPrime(u64),
    #[error("{0} is not in P_3 (neither 3 nor a prime congruent to 1 mod 3)")]
    NotInP3(u64),
    #[error("prime {0} appears twice in a support function")]
    DuplicatePrime(u64),
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("support functions are linearly dependent")]
    DependentPair,
    #[error("the zero function has no associated character")]
    ZeroFunction,
    #[error("exponent pattern is trivial or malformed: {0}")]
    BadPattern(String),
    #[error("{what} = {value} exceeds the supported bound {limit}")]
    OutOfRange {
        what: &'static str,
        value: u128,
        limit: u128,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("corrupt standard-prime cache line {line}: {reason}")]
    CorruptCache { line: usize, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for HeisError {
    fn from(e: std::io::Error) -> Self {
        HeisError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HeisError>;
