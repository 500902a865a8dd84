//! Entropy-budget normalization and the budgeted ordering comparisons.
//!
//! Two sources with entropies `H(θ1) > H(θ2)` are put on the same footing by
//! lengthening the low-entropy string: `n2 = n1 / η` with `η = H(θ2)/H(θ1)`,
//! so both strings carry the same total entropy. Guesswork budgets scale
//! the other way, `g2 = η g1`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::bisect;
use crate::scalar::{tol, Real};
use crate::source::{binary_entropy, renyi_from_log_weights, CategoricalSource, MIN_PROB};
use crate::tilt::{
    entropy_of_log_probs, entropy_range, rate_function, rate_function_logs, tilt, tilted_log_probs,
};

/// Entropies closer than this are treated as equal.
pub const EQUAL_ENTROPY_TOL: f64 = 1e-12;
/// Relative gap below which `lhs` and `rhs` are reported as equal.
pub const VERDICT_TOL: f64 = 1e-12;
/// Entropy tolerance when inverting the binary entropy.
pub const MATCH_TOL: f64 = 1e-12;

/// Ordering of `lhs` relative to `rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Less,
    Equal,
    Greater,
}

impl Verdict {
    fn of<T: Real>(lhs: T, rhs: T) -> Self {
        let scale = T::one().max(lhs.abs()).max(rhs.abs());
        let diff = lhs - rhs;
        if diff.abs() <= tol::<T>(VERDICT_TOL) * scale {
            Verdict::Equal
        } else if diff < T::zero() {
            Verdict::Less
        } else {
            Verdict::Greater
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Less => "<",
            Verdict::Equal => "=",
            Verdict::Greater => ">",
        }
    }
}

/// Which pair of exponents a [`BudgetComparison`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonKind {
    /// `H_β(θ1)` vs `H_β(θ2)/η` with `θ2` a low-entropy tilt of `θ1`.
    MomentExponent,
    /// `ln |X|` vs `H_β(θ)/η` with `η = H(θ)/ln |X|`.
    MomentVsUniform,
    /// `Λ*_{θ1}(g1)` vs `Λ*_{θ2}(η g1)/η`.
    RateFunction,
    /// `ln |X| − g` vs `Λ*_θ(η g)/η`.
    RateVsUniform,
    /// Moment exponents for an arbitrary pair; no ordering is implied.
    FreeForm,
}

impl ComparisonKind {
    /// The ordering that holds whenever `θ1` satisfies the SEC.
    pub fn expected(self) -> Option<Verdict> {
        match self {
            ComparisonKind::MomentExponent | ComparisonKind::MomentVsUniform => Some(Verdict::Less),
            ComparisonKind::RateFunction | ComparisonKind::RateVsUniform => Some(Verdict::Greater),
            ComparisonKind::FreeForm => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetComparison<T> {
    pub kind: ComparisonKind,
    pub theta1: CategoricalSource<T>,
    pub theta2: CategoricalSource<T>,
    /// `H(θ2) / H(θ1)`
    pub eta: T,
    pub n1: u64,
    /// `n1 / η`, before any rounding.
    pub n2_real: T,
    pub alpha: Option<T>,
    pub rho: Option<T>,
    pub g1: Option<T>,
    pub lhs: T,
    pub rhs: T,
    pub verdict: Verdict,
}

impl<T: Real> BudgetComparison<T> {
    #[allow(clippy::too_many_arguments)]
    fn new(
        kind: ComparisonKind,
        theta1: CategoricalSource<T>,
        theta2: CategoricalSource<T>,
        eta: T,
        alpha: Option<T>,
        rho: Option<T>,
        g1: Option<T>,
        lhs: T,
        rhs: T,
    ) -> Self {
        Self {
            kind,
            theta1,
            theta2,
            eta,
            n1: 1,
            n2_real: T::one() / eta,
            alpha,
            rho,
            g1,
            lhs,
            rhs,
            verdict: Verdict::of(lhs, rhs),
        }
    }

    /// Rescales the reported lengths to a first-source length of `n1`.
    pub fn with_length(mut self, n1: u64) -> Self {
        self.n1 = n1;
        self.n2_real = T::from_u64(n1).unwrap() / self.eta;
        self
    }

    /// `⌈n1 / η⌉`, the length used for finite-`n` experiments.
    pub fn n2_ceil(&self) -> u64 {
        ceil_length(self.n2_real)
    }

    /// Whether the expected ordering is observed; `None` for free-form pairs.
    pub fn ordering_holds(&self) -> Option<bool> {
        self.kind.expected().map(|e| e == self.verdict)
    }

    /// Gap in the direction the ordering predicts: positive when it holds.
    pub fn margin(&self) -> T {
        match self.kind.expected() {
            Some(Verdict::Greater) => self.lhs - self.rhs,
            _ => self.rhs - self.lhs,
        }
    }
}

fn ceil_length<T: Real>(n: T) -> u64 {
    // guard against 10.000000000000002 becoming 11
    let r = n.round();
    if (n - r).abs() <= tol::<T>(1e-9) * r.max(T::one()) {
        r.to_u64().unwrap_or(u64::MAX)
    } else {
        n.ceil().to_u64().unwrap_or(u64::MAX)
    }
}

fn check_entropies<T: Real>(h1: T, h2: T) -> Result<T> {
    if (h1 - h2).abs() <= tol::<T>(EQUAL_ENTROPY_TOL) {
        return Err(Error::EqualEntropy);
    }
    if h2 > h1 {
        return Err(Error::WrongOrder);
    }
    Ok(h2 / h1)
}

/// `η = H(θ2) / H(θ1)`; requires `H(θ2) < H(θ1)`.
pub fn entropy_ratio<T: Real>(theta1: &CategoricalSource<T>, theta2: &CategoricalSource<T>) -> Result<T> {
    check_entropies(theta1.shannon_entropy(), theta2.shannon_entropy())
}

/// Puts the higher-entropy source first. Returns the ordered pair, `η`, and
/// whether the inputs were swapped.
pub fn order_by_entropy<T: Real>(
    a: &CategoricalSource<T>,
    b: &CategoricalSource<T>,
) -> Result<(CategoricalSource<T>, CategoricalSource<T>, T, bool)> {
    let (ha, hb) = (a.shannon_entropy(), b.shannon_entropy());
    if (ha - hb).abs() <= tol::<T>(EQUAL_ENTROPY_TOL) {
        return Err(Error::EqualEntropy);
    }
    if hb < ha {
        Ok((a.clone(), b.clone(), hb / ha, false))
    } else {
        Ok((b.clone(), a.clone(), ha / hb, true))
    }
}

fn check_rho<T: Real>(rho: T) -> Result<T> {
    if !(rho > T::zero()) || rho.is_infinite() {
        return Err(Error::out_of_range("rho", rho.as_f64(), "(0, inf)"));
    }
    Ok(T::one() / (T::one() + rho))
}

fn check_low_entropy_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha > T::one()) || alpha.is_infinite() {
        return Err(Error::out_of_range("alpha", alpha.as_f64(), "(1, inf)"));
    }
    Ok(())
}

/// Moment exponents of an arbitrary pair, ordered so that `H(θ2) < H(θ1)`.
pub fn compare_free_form<T: Real>(
    a: &CategoricalSource<T>,
    b: &CategoricalSource<T>,
    rho: T,
) -> Result<BudgetComparison<T>> {
    let beta = check_rho(rho)?;
    let (theta1, theta2, eta, _) = order_by_entropy(a, b)?;
    let lhs = renyi_from_log_weights(&theta1.log_probs(), beta);
    let rhs = renyi_from_log_weights(&theta2.log_probs(), beta) / eta;
    Ok(BudgetComparison::new(
        ComparisonKind::FreeForm,
        theta1,
        theta2,
        eta,
        None,
        Some(rho),
        None,
        lhs,
        rhs,
    ))
}

/// `H_{1/(1+ρ)}(θ1)` against `H_{1/(1+ρ)}(θ2)/η` for `θ2 = τ(θ1, α)`, `α > 1`.
pub fn compare_moment_exponents<T: Real>(
    theta1: &CategoricalSource<T>,
    alpha: T,
    rho: T,
) -> Result<BudgetComparison<T>> {
    if theta1.is_uniform() {
        return Err(Error::UniformInput);
    }
    check_low_entropy_alpha(alpha)?;
    let beta = check_rho(rho)?;
    let l1 = theta1.log_probs();
    let l2 = tilted_log_probs(&l1, alpha);
    let eta = check_entropies(theta1.shannon_entropy(), entropy_of_log_probs(&l2))?;
    let lhs = renyi_from_log_weights(&l1, beta);
    let rhs = renyi_from_log_weights(&l2, beta) / eta;
    Ok(BudgetComparison::new(
        ComparisonKind::MomentExponent,
        theta1.clone(),
        tilt(theta1, alpha)?.dist,
        eta,
        Some(alpha),
        Some(rho),
        None,
        lhs,
        rhs,
    ))
}

/// `ln |X|` against `H_{1/(1+ρ)}(θ)/η` with `η = H(θ)/ln |X|`.
pub fn compare_vs_uniform_moments<T: Real>(theta: &CategoricalSource<T>, rho: T) -> Result<BudgetComparison<T>> {
    if theta.is_uniform() {
        return Err(Error::UniformInput);
    }
    let beta = check_rho(rho)?;
    let k = theta.alphabet_size();
    let lhs = T::from_usize(k).unwrap().ln();
    let eta = check_entropies(lhs, theta.shannon_entropy())?;
    let rhs = theta.renyi_entropy(beta)? / eta;
    Ok(BudgetComparison::new(
        ComparisonKind::MomentVsUniform,
        CategoricalSource::uniform(k)?,
        theta.clone(),
        eta,
        None,
        Some(rho),
        None,
        lhs,
        rhs,
    ))
}

/// `Λ*_{θ1}(g1)` against `Λ*_{θ2}(η g1)/η` for `θ2 = τ(θ1, α)`, `α > 1`.
pub fn compare_rate_functions<T: Real>(
    theta1: &CategoricalSource<T>,
    alpha: T,
    g1: T,
) -> Result<BudgetComparison<T>> {
    if theta1.is_uniform() {
        return Err(Error::UniformInput);
    }
    check_low_entropy_alpha(alpha)?;
    let h1 = theta1.shannon_entropy();
    if !(g1 > T::zero() && g1 < h1) {
        return Err(Error::OutOfRegime {
            g1: g1.as_f64(),
            entropy: h1.as_f64(),
        });
    }
    let l1 = theta1.log_probs();
    let l2 = tilted_log_probs(&l1, alpha);
    let eta = check_entropies(h1, entropy_of_log_probs(&l2))?;
    let lhs = rate_function(theta1, g1)?;
    // tilting keeps the set of maximal entries, so both families share a range
    let rhs = rate_function_logs(&l2, entropy_range(theta1), eta * g1)? / eta;
    Ok(BudgetComparison::new(
        ComparisonKind::RateFunction,
        theta1.clone(),
        tilt(theta1, alpha)?.dist,
        eta,
        Some(alpha),
        None,
        Some(g1),
        lhs,
        rhs,
    ))
}

/// `ln |X| − g` against `Λ*_θ(η g)/η` with `η = H(θ)/ln |X|`.
pub fn compare_vs_uniform_rate<T: Real>(theta: &CategoricalSource<T>, g: T) -> Result<BudgetComparison<T>> {
    if theta.is_uniform() {
        return Err(Error::UniformInput);
    }
    let k = theta.alphabet_size();
    let log_k = T::from_usize(k).unwrap().ln();
    if !(g > T::zero() && g < log_k) {
        return Err(Error::OutOfRegime {
            g1: g.as_f64(),
            entropy: log_k.as_f64(),
        });
    }
    let eta = check_entropies(log_k, theta.shannon_entropy())?;
    let lhs = log_k - g;
    let rhs = rate_function(theta, eta * g)? / eta;
    Ok(BudgetComparison::new(
        ComparisonKind::RateVsUniform,
        CategoricalSource::uniform(k)?,
        theta.clone(),
        eta,
        None,
        None,
        Some(g),
        lhs,
        rhs,
    ))
}

/// Inverts the binary entropy on `(0, 1/2]`.
pub fn binary_entropy_inverse<T: Real>(h: T) -> Result<T> {
    let ln2 = T::LN_2();
    let tol_h = tol::<T>(MATCH_TOL);
    if (h - ln2).abs() <= tol_h {
        return Ok(T::lit(0.5));
    }
    let floor = T::lit(MIN_PROB);
    if !(h > binary_entropy(floor) && h < ln2) {
        return Err(Error::out_of_range("binary entropy", h.as_f64(), "(h(1e-12), ln 2]"));
    }
    let sol = bisect(|p| binary_entropy(p) - h, floor, T::lit(0.5), tol_h, 400);
    Ok(sol.root)
}

/// One binary source per length `n` with `n H(θ) = total_entropy_nats`.
pub fn match_sources_to_budget<T: Real>(
    total_entropy_nats: T,
    lengths: &[u64],
) -> Result<Vec<CategoricalSource<T>>> {
    table1(total_entropy_nats, lengths)?
        .into_iter()
        .map(|row| CategoricalSource::binary(row.phi))
        .collect()
}

/// A matched binary source and its entropy budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetRow<T> {
    pub n: u64,
    pub phi: T,
    pub entropy: T,
    /// `n H(θ)`
    pub total_entropy: T,
}

/// Binary sources of equal total entropy, one per length.
pub fn table1<T: Real>(total_entropy_nats: T, lengths: &[u64]) -> Result<Vec<BudgetRow<T>>> {
    if !(total_entropy_nats > T::zero()) || total_entropy_nats.is_infinite() {
        return Err(Error::out_of_range(
            "total entropy",
            total_entropy_nats.as_f64(),
            "(0, inf)",
        ));
    }
    lengths
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::out_of_range("n", 0.0, "[1, inf)"));
            }
            let len = T::from_u64(n).unwrap();
            let required = total_entropy_nats / len;
            if required > T::LN_2() + tol::<T>(MATCH_TOL) {
                return Err(Error::Infeasible {
                    required: required.as_f64(),
                    length: n,
                });
            }
            let phi = binary_entropy_inverse(required)?;
            let entropy = binary_entropy(phi);
            Ok(BudgetRow {
                n,
                phi,
                entropy,
                total_entropy: len * entropy,
            })
        })
        .collect()
}

/// Lengths and parameters of the equal-budget binary family used for the
/// finite-length experiments.
pub const TABLE1_LENGTHS: [u64; 6] = [9, 10, 12, 15, 18, 22];

/// `9 ln 2` nats.
pub fn table1_budget<T: Real>() -> T {
    T::lit(9.0) * T::LN_2()
}

/// Smallest length whose total entropy reaches `total_entropy_nats`.
pub fn length_for_budget<T: Real>(theta: &CategoricalSource<T>, total_entropy_nats: T) -> u64 {
    ceil_length(total_entropy_nats / theta.shannon_entropy())
}

/// Outcome of a grid search for ordering violations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationSearch<T> {
    /// Grid points where the comparison was defined.
    pub evaluated: usize,
    /// Grid points skipped because a budget fell outside an attainable range.
    pub skipped: usize,
    pub violations: Vec<BudgetComparison<T>>,
    /// Smallest [`BudgetComparison::margin`] seen.
    pub min_margin: T,
}

impl<T: Real> ViolationSearch<T> {
    fn collect(results: Vec<Result<BudgetComparison<T>>>) -> Result<Self> {
        let mut out = ViolationSearch {
            evaluated: 0,
            skipped: 0,
            violations: Vec::new(),
            min_margin: T::infinity(),
        };
        for r in results {
            match r {
                Ok(c) => {
                    out.evaluated += 1;
                    out.min_margin = out.min_margin.min(c.margin());
                    if c.ordering_holds() == Some(false) {
                        out.violations.push(c);
                    }
                }
                Err(Error::OutOfEntropyRange { .. } | Error::OutOfRegime { .. } | Error::EqualEntropy) => {
                    out.skipped += 1
                }
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    pub fn found(&self) -> bool {
        !self.violations.is_empty()
    }
}

fn linspace(start: f64, step: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|i| start + step * i as f64).collect()
}

/// `α ∈ {1.05, 1.10, …, 3.00}`.
pub fn default_alpha_grid<T: Real>() -> Vec<T> {
    linspace(1.0, 0.05, 40).into_iter().map(T::lit).collect()
}

/// `ρ ∈ {0.05, 0.10, …, 2.00}`.
pub fn default_rho_grid<T: Real>() -> Vec<T> {
    linspace(0.0, 0.05, 40).into_iter().map(T::lit).collect()
}

/// Fractions `f ∈ {0.05, …, 0.95}` placing `g1` inside its admissible range.
pub fn default_g_fractions<T: Real>() -> Vec<T> {
    linspace(0.0, 0.05, 19).into_iter().map(T::lit).collect()
}

/// Evaluates [`compare_moment_exponents`] on `alphas × rhos`.
pub fn search_moment_violations<T: Real>(
    theta1: &CategoricalSource<T>,
    alphas: &[T],
    rhos: &[T],
) -> Result<ViolationSearch<T>> {
    let grid: Vec<(T, T)> = alphas
        .iter()
        .flat_map(|&a| rhos.iter().map(move |&r| (a, r)))
        .collect();
    let results = grid
        .par_iter()
        .map(|&(a, r)| compare_moment_exponents(theta1, a, r))
        .collect();
    ViolationSearch::collect(results)
}

/// Evaluates [`compare_rate_functions`] on `alphas × fractions`, with
/// `g1 = lo + f (H(θ1) − lo)` and `lo = ln m / η` so that `η g1` stays above
/// the lower end `ln m` of the tilted family's range.
pub fn search_rate_violations<T: Real>(
    theta1: &CategoricalSource<T>,
    alphas: &[T],
    fractions: &[T],
) -> Result<ViolationSearch<T>> {
    if theta1.is_uniform() {
        return Err(Error::UniformInput);
    }
    let h1 = theta1.shannon_entropy();
    let (log_m, _) = entropy_range(theta1);
    let l1 = theta1.log_probs();
    let grid: Vec<(T, T)> = alphas
        .iter()
        .flat_map(|&a| fractions.iter().map(move |&f| (a, f)))
        .collect();
    let results = grid
        .par_iter()
        .map(|&(a, f)| {
            check_low_entropy_alpha(a)?;
            let eta = entropy_of_log_probs(&tilted_log_probs(&l1, a)) / h1;
            let lo = log_m / eta;
            compare_rate_functions(theta1, a, lo + f * (h1 - lo))
        })
        .collect();
    ViolationSearch::collect(results)
}

/// Tally of a sweep where every comparison is expected to hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummary<T> {
    pub evaluated: usize,
    pub violations: usize,
    pub min_margin: T,
}

fn summarize<T: Real>(results: Vec<Result<BudgetComparison<T>>>) -> Result<SweepSummary<T>> {
    let s = ViolationSearch::collect(results)?;
    Ok(SweepSummary {
        evaluated: s.evaluated,
        violations: s.violations.len(),
        min_margin: s.min_margin,
    })
}

/// [`compare_moment_exponents`] over `sources × alphas × rhos`.
pub fn moment_sweep<T: Real>(
    sources: &[CategoricalSource<T>],
    alphas: &[T],
    rhos: &[T],
) -> Result<SweepSummary<T>> {
    let results = sources
        .par_iter()
        .flat_map_iter(|s| {
            alphas
                .iter()
                .flat_map(move |&a| rhos.iter().map(move |&r| compare_moment_exponents(s, a, r)))
        })
        .collect();
    summarize(results)
}

/// [`compare_rate_functions`] over `sources × alphas`, with
/// `g1 = f H(θ1)` for each fraction `f`.
pub fn rate_sweep<T: Real>(
    sources: &[CategoricalSource<T>],
    alphas: &[T],
    fractions: &[T],
) -> Result<SweepSummary<T>> {
    let results = sources
        .par_iter()
        .flat_map_iter(|s| {
            let h = s.shannon_entropy();
            alphas.iter().flat_map(move |&a| {
                fractions
                    .iter()
                    .map(move |&f| compare_rate_functions(s, a, f * h))
            })
        })
        .collect();
    summarize(results)
}

/// [`compare_vs_uniform_moments`] over `sources × rhos`.
pub fn uniform_moment_sweep<T: Real>(sources: &[CategoricalSource<T>], rhos: &[T]) -> Result<SweepSummary<T>> {
    let results = sources
        .par_iter()
        .flat_map_iter(|s| rhos.iter().map(move |&r| compare_vs_uniform_moments(s, r)))
        .collect();
    summarize(results)
}

/// [`compare_vs_uniform_rate`] over `sources`, with `g = f ln |X|`.
pub fn uniform_rate_sweep<T: Real>(sources: &[CategoricalSource<T>], fractions: &[T]) -> Result<SweepSummary<T>> {
    let results = sources
        .par_iter()
        .flat_map_iter(|s| {
            let log_k = T::from_usize(s.alphabet_size()).unwrap().ln();
            fractions
                .iter()
                .map(move |&f| compare_vs_uniform_rate(s, f * log_k))
        })
        .collect();
    summarize(results)
}
