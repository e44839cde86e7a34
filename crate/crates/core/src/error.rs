use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("curve is singular (discriminant zero)")]
    SingularCurve,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("bad reduction at {0}")]
    BadReduction(u64),
    #[error("{what} exceeded its cap of {cap}")]
    BudgetExceeded { what: &'static str, cap: u64 },
    #[error("precision p^{have} insufficient, need at least p^{required}")]
    PrecisionInsufficient { have: u32, required: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{prime} is ramified in the degree-{degree} subfield of conductor {conductor}")]
    Ramified { prime: u64, degree: u64, conductor: u64 },
    #[error("point lies on the non-identity component of E(R)")]
    NonIdentityComponent,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}
