use thiserror::Error;

/// Errors raised by the exact arithmetic, solenoid, and construction routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("zero has no finite valuation or absolute value here")]
    ZeroInput,
    #[error("mixed quadratic fields Q(sqrt {0}) and Q(sqrt {1})")]
    FieldMismatch(u64, u64),
    #[error("prime sets differ: {0} vs {1}")]
    PrimeSetMismatch(String, String),
    #[error("point {0} is outside the fundamental domain [0,1) x prod Z_p")]
    NotReduced(String),
    #[error("{0} is not an element of Z[1/Q] for Q = {1}")]
    NotInGamma(String, String),
    #[error("congruence constraints have no common solution")]
    InconsistentConstraints,
    #[error("character index gamma = 0 gives the trivial character")]
    TrivialCharacter,
    #[error("rotation is not minimal: real coordinate {0} is rational")]
    NotMinimal(String),
    #[error("lambda + alpha has a vanishing coordinate at {0}")]
    ConditionViolated(String),
    #[error("volume {0} is negative")]
    NegativeVolume(String),
    #[error("gamma must be nonzero")]
    ZeroGamma,
    #[error("gamma {0} is not of the form +-(p1...pk)^-l")]
    NotSpecialGamma(String),
    #[error("multiplicity certificate {certificate} does not cover negative weight {needed}")]
    CertificateFailure { certificate: String, needed: String },
    #[error("indicator evaluated to negative multiplicity {0}")]
    NegativeIndicator(String),
    #[error("unsupported coordinate: {0}")]
    UnsupportedCoordinate(String),
    #[error("exact identity failed: {0}")]
    IdentityFailure(String),
    #[error("value {0} does not fit the integer range used here")]
    Overflow(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
