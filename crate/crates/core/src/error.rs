use thiserror::Error;

/// Every failure mode of the library. Each one is a domain or usage error, not a bug.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NotOddPrime: {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("FieldTooLarge: {0} exceeds the supported table size")]
    FieldTooLarge(u64),
    #[error("WrongResidueClass: p = {p} is not congruent to 1 mod 4")]
    WrongResidueClass { p: u64 },
    #[error("PatternTooLong: pattern of length {len} does not fit in W_{p}")]
    PatternTooLong { len: usize, p: u64 },
    #[error("InvalidPattern: unexpected letter {0:?} (expected X or Y)")]
    InvalidPattern(char),
    #[error("EmptyPattern")]
    EmptyPattern,
    #[error("InvalidIndexSet: {0}")]
    InvalidIndexSet(String),
    #[error("DuplicateResidues: quadruple entries must be distinct mod {p}")]
    DuplicateResidues { p: u64 },
    #[error("NotIntegral: ({j}^2 - 4) is not divisible by 32")]
    NotIntegral { j: i64 },
    #[error("SingularCurve: {curve} has bad reduction at p = {p}")]
    SingularCurve { curve: String, p: u64 },
    #[error("UnknownCurve: {0}")]
    UnknownCurve(String),
    #[error("UnknownClaim: {0}")]
    UnknownClaim(String),
    #[error("UnknownClass: {0}")]
    UnknownClass(String),
    #[error("OutOfDomain: {0} is outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("EmptySample")]
    EmptySample,
    #[error("BoundTooSmall: bound {bound} is below the minimum {min}")]
    BoundTooSmall { bound: u64, min: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
