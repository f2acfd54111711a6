use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants fall into the four exit-code classes used by the CLI:
/// usage/domain errors, resource guards, verification failures and
/// internal consistency failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("modulus mismatch: p = {0} vs p = {1}")]
    ModulusMismatch(u32, u32),

    #[error("digit {digit} out of range for p = {p}")]
    DigitOutOfRange { digit: u32, p: u32 },

    #[error("operation requires p >= 5, got p = {0}")]
    UnsupportedModulus(u32),

    #[error("p = {p} exceeds the build guard ({guard})")]
    PrimeGuard { p: u64, guard: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource guard exceeded: {0}")]
    Resource(String),

    #[error("closure for p = {p} produced {states} states, more than p + 3")]
    StateBound { p: u32, states: usize },

    #[error("unexpected state {poly} in the closure for p = {p}")]
    UnexpectedState { p: u32, poly: String },

    #[error("malformed nonnegative decimal integer {0:?}")]
    Parse(String),

    #[error("non-canonical digit string: {0}")]
    NonCanonical(String),

    #[error("invalid automaton JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
