use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curve parameters: D={dim}, K={k} ({reason})")]
    InvalidParams { dim: u32, k: u32, reason: &'static str },

    #[error("value {value} is outside X^{dim}_{k}")]
    ValueOutOfRange { value: u64, dim: u32, k: u32 },

    #[error("invalid dimension {index} for D={dim}")]
    InvalidDimension { index: usize, dim: u32 },

    #[error("empty chain")]
    EmptyChain,

    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),

    #[error("enumeration too large: D*K = {bits} exceeds the cap of {cap} bits")]
    EnumerationTooLarge { bits: u32, cap: u32 },

    #[error("tolerance ambiguity: gap {gap:e} between radii {lower} and {upper} lies in (tight, split]")]
    ToleranceAmbiguity { gap: f64, lower: f64, upper: f64 },

    #[error("invalid tolerances: split {split:e} must exceed tight {tight:e}")]
    InvalidTolerance { split: f64, tight: f64 },

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("value {0} is not a member of the subset")]
    NotInSubset(u64),

    #[error("coplanes are only defined for D in {{2, 3}}, got D={0}")]
    CoplaneDimension(u32),

    #[error("subset generator needs at least 2 elements, got {0}")]
    SubsetTooSmall(usize),

    #[error("invalid equivalent-position parameters: {0}")]
    InvalidPhiParams(String),

    #[error("unknown canonical size {0}")]
    UnknownCanonicalSize(usize),

    #[error("no assignment satisfies the canonical constraint system for size {0}")]
    NoCanonicalAssignment(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("report serialization failed: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;
