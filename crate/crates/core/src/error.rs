use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a source needs at least 2 symbols, got {0}")]
    EmptyOrSingleton(usize),

    #[error("weight {index} is negative or not finite ({value})")]
    InvalidWeight { index: usize, value: f64 },

    #[error("weights sum to zero")]
    ZeroMass,

    #[error("entry {index} is {value:e} after normalization, below the floor {floor:e}")]
    NonPositiveEntry { index: usize, value: f64, floor: f64 },

    #[error("Renyi order {0} is within 1e-9 of 1; use the Shannon entropy")]
    OrderAtOne(f64),

    #[error("{name} = {value} is outside {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("alphabet sizes differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("the base source is uniform; its tilted family is a single point")]
    UniformBase,

    #[error("the input source is uniform")]
    UniformInput,

    #[error("entropy {g} is outside the attainable open interval ({lo}, {hi})")]
    OutOfEntropyRange { g: f64, lo: f64, hi: f64 },

    #[error("entropy bisection did not converge (residual {0:e})")]
    NoConvergence(f64),

    #[error("finite differences are ill-conditioned: entry {0:e} below 1e-6")]
    IllConditioned(f64),

    #[error("composition count {count} exceeds the guard {limit}")]
    TooManyClasses { count: f64, limit: u64 },

    #[error("{count} strings exceed the enumeration limit {limit}")]
    TooLarge { count: f64, limit: u64 },

    #[error("moment mode {mode} unavailable: {reason}")]
    ModeUnavailable {
        mode: &'static str,
        reason: &'static str,
    },

    #[error("H(theta1) and H(theta2) coincide; the entropy ratio is 1")]
    EqualEntropy,

    #[error("expected H(theta2) < H(theta1)")]
    WrongOrder,

    #[error("g1 = {g1} is not in the regime 0 < g1 < H(theta1) = {entropy}")]
    OutOfRegime { g1: f64, entropy: f64 },

    #[error("per-character entropy {required} exceeds log 2 for length {length}")]
    Infeasible { required: f64, length: u64 },

    #[error("{points} grid points exceed the guard {limit}")]
    ResourceGuard { points: u64, limit: u64 },

    #[error("no SEC-failure witness found on the epsilon grid for |X| = {0}")]
    NotFound(usize),
}

impl Error {
    /// True for errors raised by resource caps rather than invalid input.
    pub fn is_resource_guard(&self) -> bool {
        matches!(
            self,
            Error::TooManyClasses { .. } | Error::TooLarge { .. } | Error::ResourceGuard { .. }
        )
    }

    pub(crate) fn out_of_range(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::OutOfRange {
            name,
            value,
            expected,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
