use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid exponent pair: {0}")]
    InvalidPair(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("zeta pole: argument ball contains 1")]
    Pole,
    #[error("precision exhausted at {bits} bits: {what}")]
    PrecisionExhausted { bits: u32, what: String },
    #[error("ambiguous floor: ball still straddles an integer at {bits} bits")]
    AmbiguousFloor { bits: u32 },
    #[error("ambiguous boundary: lattice value indistinguishable from x at {bits} bits")]
    AmbiguousBoundary { bits: u32 },
    #[error("ambiguous order: two jump values indistinguishable at {bits} bits")]
    AmbiguousOrder { bits: u32 },
    #[error("ambiguous tie: distance indistinguishable from delta at {bits} bits")]
    AmbiguousTie { bits: u32 },
    #[error("sign of the error term undecided at {bits} bits")]
    AmbiguousSign { bits: u32 },
    #[error("box {size} exceeds the brute-force limit {limit}")]
    BoxTooLarge { size: u64, limit: u64 },
    #[error("guard {guard} exceeded: {detail}")]
    Guard { guard: &'static str, detail: String },
    #[error("closed form for G_(a,b) used before validation")]
    GabNotValidated,
}

impl Error {
    pub(crate) fn guard(guard: &'static str, detail: impl Into<String>) -> Self {
        Error::Guard {
            guard,
            detail: detail.into(),
        }
    }

    /// True for failures caused by finite working precision.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted { .. }
                | Error::AmbiguousFloor { .. }
                | Error::AmbiguousBoundary { .. }
                | Error::AmbiguousOrder { .. }
                | Error::AmbiguousTie { .. }
                | Error::AmbiguousSign { .. }
        )
    }
}
