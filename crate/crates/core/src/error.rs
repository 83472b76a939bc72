use thiserror::Error;

/// Errors raised by construction and evaluation routines.
///
/// Every variant names the violated precondition; callers that surface these
/// to a CLI map them to usage errors, while bound violations detected by
/// verification code are a separate concern (they are reported as data, not
/// as `Error`).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("channel index {index} out of range 1..={channels}")]
    ChannelOutOfRange { index: usize, channels: usize },

    #[error("shape mismatch: {context}: expected {expected}, got {got}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("kernel spatial offset ({s},{t}) out of range -{k}..={k}")]
    OffsetOutOfRange { s: i64, t: i64, k: usize },

    #[error("spatial size must be {requirement}, got d={d}")]
    BadSpatial { requirement: &'static str, d: usize },

    #[error("squaring depth must be >= 1, got n={n}")]
    BadSqDepth { n: usize },

    #[error("widening requires at least two layers, got depth {depth}")]
    WidenTooShallow { depth: usize },

    #[error("widening target {target} is below current width {width}")]
    WidenTooNarrow { target: usize, width: usize },

    #[error("deepening target {target} is below current depth {depth}")]
    DeepenTooShallow { target: usize, depth: usize },

    #[error("concatenation requires equal depths, got {left} and {right} (deepen the shallower net first)")]
    DepthMismatch { left: usize, right: usize },

    #[error("kernel half-widths differ: {left} vs {right}")]
    HalfWidthMismatch { left: usize, right: usize },

    #[error("grid level must be >= 1, got l={l}")]
    BadLevel { l: u32 },

    #[error("grid position {i} invalid for level {l}: need odd i in 1..=2^l-1")]
    BadPosition { l: u32, i: u64 },

    #[error("dimension mismatch: {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("term ({0}) exceeds the level budget |l|_1 <= {1}")]
    BudgetExceeded(String, u64),

    #[error("duplicate term ({0}) in expansion")]
    DuplicateTerm(String),

    #[error("univariate factor {index} does not vanish at {at} (value {value:e})")]
    NonVanishingFactor { index: usize, at: f64, value: f64 },

    #[error("epsilon {epsilon:e} outside validity range for p={p}, d={d}: induced eta {eta} > 1/3")]
    EpsilonOutOfRange {
        epsilon: f64,
        p: f64,
        d: usize,
        eta: f64,
    },

    #[error("norm order p must be in [1, inf], got {p}")]
    BadNormOrder { p: f64 },

    #[error("{0}")]
    Unsupported(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
