use thiserror::Error;

use crate::carrier::SubsetMask;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("carrier has {d} points, at most {max} are supported here")]
    CarrierTooLarge { d: usize, max: usize },

    #[error("carrier must contain at least one point")]
    EmptyCarrier,

    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),

    #[error("invalid point label {0:?}: labels must be nonempty and must not contain ','")]
    InvalidLabel(String),

    #[error("unknown point label {0:?}")]
    UnknownLabel(String),

    #[error("carrier mismatch: expected {expected} points, found {found}")]
    CarrierMismatch { expected: usize, found: usize },

    #[error("subset mask {mask:#b} does not fit a carrier of {d} points")]
    MaskOutOfRange { mask: u32, d: usize },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("capacity is not completely alternating: Möbius weight {min_weight} on {witness}")]
    NotCompletelyAlternating { min_weight: f64, witness: SubsetMask },

    #[error("exact simulation requires a declared essential bound on the spectral function")]
    MissingBound,

    #[error("sample {sample} exceeded the cap of {max_terms} LePage terms")]
    MaxTermsExceeded { sample: u64, max_terms: u64 },

    #[error("parts must be pairwise disjoint")]
    OverlappingParts,

    #[error("carrier has no torus structure")]
    NotTorus,

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidValue(msg.into())
    }
}

pub(crate) fn check_lengths(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::CarrierMismatch { expected, found });
    }
    Ok(())
}
