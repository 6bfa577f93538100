use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size {p}^{k} exceeds the bound {bound}")]
    FieldTooLarge { p: u64, k: u32, bound: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("element index {index} is not in a field of size {q}")]
    NotInField { index: u32, q: u32 },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
    #[error("zeta must be nonzero")]
    ZeroZeta,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("matrix is singular")]
    Singular,
    #[error("cannot parse field element {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
    #[error("coefficient x^{index} requested beyond truncation order {order}")]
    BeyondTruncation { index: usize, order: usize },
    #[error("series truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("product factor at index {0} has constant term different from 1")]
    BadConstantTerm(usize),
    #[error("series constant term is not invertible")]
    NotInvertible,
    #[error("enumeration needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("internal integrality violation: {0}")]
    Integrality(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
