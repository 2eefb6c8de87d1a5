use thiserror::Error;

use crate::field::AdmissibilityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("modulus {0} is outside the supported range (2 <= p < 2^31)")]
    ModulusOutOfRange(u64),

    #[error("direction vector vanishes modulo the prime")]
    ZeroDirection,

    #[error("denominator vanishes identically modulo {0}")]
    DegenerateDenominator(u64),

    #[error("rational function has a zero denominator")]
    ZeroDenominator,

    #[error("polynomials are not linearly independent over the rationals")]
    NonIndependentPolys,

    #[error("polynomial {index} has a nonzero constant term")]
    NonzeroConstantTerm { index: usize },

    #[error("vector {index} is the zero vector")]
    ZeroVector { index: usize },

    #[error("invalid configuration system: {0}")]
    InvalidSystem(String),

    #[error("system is not admissible at p = {p}: {report}")]
    Inadmissible { p: u64, report: AdmissibilityReport },

    #[error("expected {expected} {what}, got {got}")]
    ArityMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("grid has dimension {got_dim} over F_{got_p}, expected dimension {dim} over F_{p}")]
    ShapeMismatch {
        p: u64,
        dim: usize,
        got_p: u64,
        got_dim: usize,
    },

    #[error("system has no rational function")]
    MissingPhi,

    #[error("every parameter is a pole of the rational function")]
    AllPoles,

    #[error("enumeration needs {needed} evaluations, cap is {cap}")]
    BudgetExceeded { needed: u128, cap: u128 },

    #[error("need at least 3 admissible primes, got {0}")]
    InsufficientLadder(usize),

    #[error("verification suite has no work (empty prime list or zero trials)")]
    EmptySuite,

    #[error("numerical invariant violated: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
