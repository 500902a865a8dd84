//! Guesswork and entropy-budget analysis for memoryless sources.
//!
//! An attacker who knows the source guesses length-`n` strings in order of
//! decreasing probability. This crate computes what that attacker achieves:
//!
//! * [`source`]: entropies (Shannon, Renyi), varentropy, skewentropy and the
//!   skewentropy condition (SEC) of a categorical source.
//! * [`tilt`]: the tilted family `τ(θ, α) ∝ θ^α`, the entropy-matching
//!   parameter `α(g)` and the rate function `Λ*_θ(g)`.
//! * [`guessing`]: exact finite-`n` guesswork moments and success
//!   probabilities through type classes, with a brute-force oracle.
//! * [`budget`]: comparisons of sources at equal total entropy and equal
//!   guesswork budget.
//! * [`secscan`]: the SEC over the simplex.
//! * [`verify`]: bundled self-checks.
//!
//! Everything is in nats. The numeric core is generic over [`Real`] (`f32` or
//! `f64`); the aliases below fix it to `f64`.
//!
//! ```
//! use guesswork::{Source, build_profile, guesswork_moment, MomentMode};
//!
//! let theta = Source::new(&[0.8, 0.2]).unwrap();
//! let profile = build_profile(&theta, 2).unwrap();
//! let log_mean = guesswork_moment(&profile, 1.0, MomentMode::ExactInteger).unwrap();
//! assert!((log_mean.exp() - 1.6).abs() < 1e-12);
//! ```

pub mod budget;
pub mod error;
pub mod guessing;
pub mod numeric;
pub mod scalar;
pub mod secscan;
pub mod source;
pub mod tilt;
pub mod verify;

pub use budget::{
    compare_free_form, compare_moment_exponents, compare_rate_functions, compare_vs_uniform_moments,
    compare_vs_uniform_rate, entropy_ratio, match_sources_to_budget, table1, ComparisonKind, Verdict,
};
pub use error::{Error, Result};
pub use guessing::{
    brute_force_oracle, build_profile, build_profile_with, empirical_exponents, guesswork_moment,
    guesswork_moment_auto, log_success_probability, success_probability, Limits, MomentMode,
    TieOrder,
};
pub use scalar::Real;
pub use secscan::{near_uniform_certificate, scan_simplex, sec_failure_witness, SecLabel};
pub use source::{CategoricalSource, MIN_PROB};
pub use tilt::{derivative_checks, entropy_range, rate_function, solve_alpha_for_entropy, tilt};

pub type Source = source::CategoricalSource<f64>;
pub type SecReport = source::SecReport<f64>;
pub type TiltPoint = tilt::TiltPoint<f64>;
pub type GuessProfile = guessing::GuessProfile<f64>;
pub type BudgetComparison = budget::BudgetComparison<f64>;
pub type SimplexGrid = secscan::SimplexGrid<f64>;
