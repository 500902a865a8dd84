//! Exact finite-length guesswork for i.i.d. sources.
//!
//! The optimal attacker queries strings of length `n` in order of decreasing
//! probability. All strings with the same symbol counts (a type class) are
//! equiprobable, so the ranking is captured by the classes alone: binary
//! `n = 2000` has 2001 classes instead of `2^2000` strings. Moments
//! `E[G^ρ]` and success probabilities `P[G ≤ N]` are computed class by class
//! in the log domain.

mod oracle;

pub use oracle::{brute_force_oracle, ranked_string_probabilities, OracleResult, TieOrder};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{log_add, log_power_gap, log_sub, log_sum_exp};
use crate::scalar::{tol, Real};
use crate::source::CategoricalSource;

/// Largest number of compositions a profile may enumerate.
pub const DEFAULT_MAX_COMPOSITIONS: u64 = 10_000_000;
/// Largest `|X|^n` for the per-rank moment mode.
pub const DEFAULT_MAX_ENUMERATED: u64 = 1 << 26;
/// Largest `|X|^n` the brute-force oracle will enumerate.
pub const DEFAULT_MAX_ORACLE: u64 = 1 << 20;
/// Log-probabilities closer than this (relative, floored at 1) are merged.
pub const TIE_TOL: f64 = 1e-12;

/// Resource caps, overridable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_compositions: u64,
    pub max_enumerated_strings: u64,
    pub max_oracle_strings: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_compositions: DEFAULT_MAX_COMPOSITIONS,
            max_enumerated_strings: DEFAULT_MAX_ENUMERATED,
            max_oracle_strings: DEFAULT_MAX_ORACLE,
        }
    }
}

impl Limits {
    pub fn unbounded() -> Self {
        Self {
            max_compositions: u64::MAX,
            max_enumerated_strings: u64::MAX,
            max_oracle_strings: u64::MAX,
        }
    }
}

/// A set of equiprobable strings occupying consecutive guess ranks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeClass<T> {
    /// Log-probability of each string in the class.
    pub log_prob: T,
    /// Log of the number of strings.
    pub log_count: T,
    /// Exact number of strings when it fits in 64 bits.
    pub count: Option<u64>,
    /// Log of the number of strictly more probable strings (`-inf` if none).
    pub log_start: T,
    /// Exact number of strictly more probable strings.
    pub start: Option<u64>,
}

impl<T: Real> TypeClass<T> {
    /// Log of the probability mass carried by the whole class.
    pub fn log_mass(&self) -> T {
        self.log_count + self.log_prob
    }
}

/// Type-class decomposition of `X^n`, sorted by decreasing string probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuessProfile<T> {
    pub base: CategoricalSource<T>,
    pub length: u64,
    pub classes: Vec<TypeClass<T>>,
    /// `n ln |X|`
    pub log_total_strings: T,
    pub total_strings: Option<u64>,
    pub limits: Limits,
}

fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

fn multinomial_u64(n: u64, parts: &[u64]) -> Option<u64> {
    let mut remaining = n;
    let mut acc: u64 = 1;
    for &k in parts {
        acc = acc.checked_mul(binomial_u64(remaining, k)?)?;
        remaining -= k;
    }
    Some(acc)
}

/// `C(n + k − 1, k − 1)` as a float, saturating to infinity.
fn composition_count(n: u64, symbols: usize) -> f64 {
    let r = (symbols - 1) as u64;
    let mut acc = 1f64;
    for i in 0..r {
        acc = acc * (n + r - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Calls `visit` once per composition `(k_1, …, k_s)` of `n`, in
/// lexicographic order.
fn for_each_composition<F: FnMut(&[u64])>(n: u64, symbols: usize, mut visit: F) {
    let mut parts = vec![0u64; symbols];
    parts[symbols - 1] = n;
    loop {
        visit(&parts);
        // advance: find the rightmost position (excluding the last) that can grow
        let mut i = symbols - 1;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            let tail = parts[symbols - 1];
            if tail > 0 {
                parts[i] += 1;
                parts[symbols - 1] = tail - 1;
                break;
            }
            // carry: reset position i into the tail
            parts[symbols - 1] += parts[i];
            parts[i] = 0;
        }
    }
}

struct RawClass<T> {
    log_prob: T,
    log_count: T,
    count: Option<u64>,
}

/// Builds the profile with the default [`Limits`].
pub fn build_profile<T: Real>(base: &CategoricalSource<T>, n: u64) -> Result<GuessProfile<T>> {
    build_profile_with(base, n, Limits::default())
}

pub fn build_profile_with<T: Real>(
    base: &CategoricalSource<T>,
    n: u64,
    limits: Limits,
) -> Result<GuessProfile<T>> {
    if n == 0 {
        return Err(Error::out_of_range("n", 0.0, "[1, inf)"));
    }
    let symbols = base.alphabet_size();
    let compositions = composition_count(n, symbols);
    if compositions > limits.max_compositions as f64 {
        return Err(Error::TooManyClasses {
            count: compositions,
            limit: limits.max_compositions,
        });
    }
    let log_theta = base.log_probs();
    let log_fact: Vec<T> = (0..=n)
        .map(|j| T::from_u64(j + 1).unwrap().log_gamma())
        .collect();

    let mut raw: Vec<RawClass<T>> = Vec::with_capacity(compositions as usize);
    for_each_composition(n, symbols, |parts| {
        let mut log_prob = T::zero();
        for (&k, &l) in parts.iter().zip(&log_theta) {
            if k > 0 {
                log_prob += T::from_u64(k).unwrap() * l;
            }
        }
        let count = multinomial_u64(n, parts);
        let log_count = match count {
            Some(c) => T::from_u64(c).unwrap().ln(),
            None => parts
                .iter()
                .fold(log_fact[n as usize], |acc, &k| acc - log_fact[k as usize]),
        };
        raw.push(RawClass {
            log_prob,
            log_count,
            count,
        });
    });
    raw.sort_by(|a, b| b.log_prob.total_cmp(&a.log_prob));

    let tie = tol::<T>(TIE_TOL);
    let mut classes: Vec<TypeClass<T>> = Vec::with_capacity(raw.len());
    let mut log_start = T::neg_infinity();
    let mut start = Some(0u64);
    let mut i = 0;
    while i < raw.len() {
        let anchor = raw[i].log_prob;
        let width = tie * anchor.abs().max(T::one());
        let mut j = i + 1;
        while j < raw.len() && anchor - raw[j].log_prob <= width {
            j += 1;
        }
        let group = &raw[i..j];
        let (log_prob, log_count, count) = if group.len() == 1 {
            (group[0].log_prob, group[0].log_count, group[0].count)
        } else {
            let counts: Vec<T> = group.iter().map(|c| c.log_count).collect();
            let masses: Vec<T> = group.iter().map(|c| c.log_count + c.log_prob).collect();
            let log_count = log_sum_exp(&counts);
            let count = group
                .iter()
                .try_fold(0u64, |acc, c| acc.checked_add(c.count?));
            (log_sum_exp(&masses) - log_count, log_count, count)
        };
        classes.push(TypeClass {
            log_prob,
            log_count,
            count,
            log_start,
            start,
        });
        log_start = log_add(log_start, log_count);
        start = match (start, count) {
            (Some(s), Some(c)) => s.checked_add(c),
            _ => None,
        };
        i = j;
    }

    let total_strings = (symbols as u64).checked_pow(n.min(u32::MAX as u64) as u32);
    Ok(GuessProfile {
        base: base.clone(),
        length: n,
        classes,
        log_total_strings: T::from_u64(n).unwrap() * T::from_usize(symbols).unwrap().ln(),
        total_strings,
        limits,
    })
}

impl<T: Real> GuessProfile<T> {
    /// `ln Σ count · p`; zero up to rounding.
    pub fn log_total_mass(&self) -> T {
        let masses: Vec<T> = self.classes.iter().map(TypeClass::log_mass).collect();
        log_sum_exp(&masses)
    }
}

/// How the inner rank sums `Σ_{j=s+1}^{s+m} j^ρ` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMode {
    /// Sum every rank; needs `|X|^n ≤ 2^26`.
    ExactEnumerated,
    /// Faulhaber closed forms; needs `ρ ∈ {1, 2, 3}`.
    ExactInteger,
    /// `((b+½)^{ρ+1} − (a−½)^{ρ+1}) / (ρ+1)`; always available.
    IntegralApprox,
}

impl MomentMode {
    pub fn name(self) -> &'static str {
        match self {
            MomentMode::ExactEnumerated => "exact_enumerated",
            MomentMode::ExactInteger => "exact_integer",
            MomentMode::IntegralApprox => "integral_approx",
        }
    }
}

fn integer_rho<T: Real>(rho: T) -> Option<u32> {
    [1u32, 2, 3]
        .into_iter()
        .find(|&r| (rho - T::from_u32(r).unwrap()).abs() <= tol::<T>(1e-12))
}

/// Most accurate mode available for this profile and `ρ`.
pub fn auto_mode<T: Real>(profile: &GuessProfile<T>, rho: T) -> MomentMode {
    match profile.total_strings {
        Some(t) if t <= profile.limits.max_enumerated_strings => MomentMode::ExactEnumerated,
        _ if integer_rho(rho).is_some() => MomentMode::ExactInteger,
        _ => MomentMode::IntegralApprox,
    }
}

fn log_rank_sum_enumerated<T: Real>(start: u64, count: u64, rho: T) -> T {
    let terms = (start + 1..=start + count).map(|j| T::from_u64(j).unwrap().powf(rho));
    crate::numeric::neumaier_sum(terms).ln()
}

/// `ln Σ_{k=1}^{m} (s + k)^r` for `r ∈ {1, 2, 3}`; every term is positive so
/// the expansion is safe in the log domain.
fn log_rank_sum_faulhaber<T: Real>(ls: T, lm: T, r: u32) -> T {
    let ln2 = T::LN_2();
    let lm1 = log_add(lm, T::zero());
    let l2m1 = log_add(ln2 + lm, T::zero());
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let terms: Vec<T> = match r {
        1 => vec![lm + ls, lm + lm1 - ln2],
        2 => vec![
            lm + two * ls,
            ls + lm + lm1,
            lm + lm1 + l2m1 - T::lit(6.0).ln(),
        ],
        _ => vec![
            lm + three * ls,
            T::lit(1.5).ln() + two * ls + lm + lm1,
            ls + lm + lm1 + l2m1 - ln2,
            two * (lm + lm1) - T::lit(4.0).ln(),
        ],
    };
    log_sum_exp(&terms)
}

fn log_rank_sum_integral<T: Real>(ls: T, lm: T, rho: T) -> T {
    let e = rho + T::one();
    let log_s_half = log_add(ls, -T::LN_2());
    log_power_gap(log_s_half, lm, e) - e.ln()
}

/// `ln E[G^ρ]` for the optimal guessing order.
pub fn guesswork_moment<T: Real>(profile: &GuessProfile<T>, rho: T, mode: MomentMode) -> Result<T> {
    if !(rho > T::zero()) || rho.is_infinite() {
        return Err(Error::out_of_range("rho", rho.as_f64(), "(0, inf)"));
    }
    let per_class: Vec<T> = match mode {
        MomentMode::ExactEnumerated => {
            match profile.total_strings {
                Some(t) if t <= profile.limits.max_enumerated_strings => {}
                _ => {
                    return Err(Error::ModeUnavailable {
                        mode: mode.name(),
                        reason: "|X|^n exceeds the enumeration cap",
                    })
                }
            }
            profile
                .classes
                .iter()
                .map(|c| {
                    let (s, m) = (c.start.unwrap(), c.count.unwrap());
                    c.log_prob + log_rank_sum_enumerated(s, m, rho)
                })
                .collect()
        }
        MomentMode::ExactInteger => {
            let r = integer_rho(rho).ok_or(Error::ModeUnavailable {
                mode: mode.name(),
                reason: "rho must be 1, 2 or 3",
            })?;
            profile
                .classes
                .iter()
                .map(|c| c.log_prob + log_rank_sum_faulhaber(c.log_start, c.log_count, r))
                .collect()
        }
        MomentMode::IntegralApprox => profile
            .classes
            .iter()
            .map(|c| c.log_prob + log_rank_sum_integral(c.log_start, c.log_count, rho))
            .collect(),
    };
    Ok(log_sum_exp(&per_class))
}

/// [`guesswork_moment`] with [`auto_mode`].
pub fn guesswork_moment_auto<T: Real>(profile: &GuessProfile<T>, rho: T) -> Result<(T, MomentMode)> {
    let mode = auto_mode(profile, rho);
    Ok((guesswork_moment(profile, rho, mode)?, mode))
}

/// Number of queries `N = ⌊e^{log_budget}⌋ ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryBudget<T> {
    pub exact: Option<u64>,
    pub log_queries: T,
}

impl<T: Real> QueryBudget<T> {
    /// Budgets whose exponential lands within `1e-9` (relative) of an
    /// integer map to that integer, so `ln N` round-trips to `N`.
    pub fn from_log(log_budget: T) -> Result<Self> {
        if !(log_budget >= T::zero()) || log_budget.is_infinite() {
            return Err(Error::out_of_range("log_budget", log_budget.as_f64(), "[0, inf)"));
        }
        let lb = log_budget.as_f64();
        if lb < 62.0 * std::f64::consts::LN_2 {
            let x = lb.exp();
            let r = x.round();
            let n = if (x - r).abs() <= 1e-9 * r { r } else { x.floor() };
            Ok(Self::from_queries(n.max(1.0) as u64))
        } else {
            Ok(Self {
                exact: None,
                log_queries: log_budget,
            })
        }
    }

    pub fn from_queries(n: u64) -> Self {
        let n = n.max(1);
        Self {
            exact: Some(n),
            log_queries: T::from_u64(n).unwrap().ln(),
        }
    }
}

/// `ln P[G ≤ N]`.
pub fn log_success_probability_for<T: Real>(profile: &GuessProfile<T>, budget: QueryBudget<T>) -> T {
    let covers_all = match (budget.exact, profile.total_strings) {
        (Some(n), Some(t)) => n >= t,
        _ => budget.log_queries >= profile.log_total_strings,
    };
    if covers_all {
        return T::zero();
    }
    let mut terms = Vec::new();
    for c in &profile.classes {
        let end_within = match (budget.exact, c.start, c.count) {
            (Some(n), Some(s), Some(m)) => s.checked_add(m).is_some_and(|e| e <= n),
            _ => log_add(c.log_start, c.log_count) <= budget.log_queries,
        };
        if end_within {
            terms.push(c.log_mass());
            continue;
        }
        let log_remaining = match (budget.exact, c.start) {
            (Some(n), Some(s)) => T::from_u64(n - s).unwrap().ln(),
            _ => log_sub(budget.log_queries, c.log_start),
        };
        terms.push(log_remaining + c.log_prob);
        break;
    }
    log_sum_exp(&terms).min(T::zero())
}

/// `ln P[G ≤ ⌊e^{log_budget}⌋]`.
pub fn log_success_probability<T: Real>(profile: &GuessProfile<T>, log_budget: T) -> Result<T> {
    Ok(log_success_probability_for(profile, QueryBudget::from_log(log_budget)?))
}

/// `P[G ≤ ⌊e^{log_budget}⌋]`, exactly 1 once the budget covers `|X|^n`.
pub fn success_probability<T: Real>(profile: &GuessProfile<T>, log_budget: T) -> Result<T> {
    Ok(log_success_probability(profile, log_budget)?.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentExponent<T> {
    pub rho: T,
    pub log_moment: T,
    /// `(1/n) ln E[G^ρ]`
    pub exponent: T,
    pub mode: MomentMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuccessExponent<T> {
    pub g: T,
    pub log_success: T,
    /// `(1/n) ln 1/P[G ≤ e^{gn}]`
    pub exponent: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalExponents<T> {
    pub length: u64,
    pub moments: Vec<MomentExponent<T>>,
    pub success: Vec<SuccessExponent<T>>,
}

/// Finite-`n` normalized moment and success exponents.
pub fn empirical_exponents<T: Real>(
    base: &CategoricalSource<T>,
    n: u64,
    rho_grid: &[T],
    g_grid: &[T],
) -> Result<EmpiricalExponents<T>> {
    let profile = build_profile(base, n)?;
    let len = T::from_u64(n).unwrap();
    let moments = rho_grid
        .iter()
        .map(|&rho| {
            let (log_moment, mode) = guesswork_moment_auto(&profile, rho)?;
            Ok(MomentExponent {
                rho,
                log_moment,
                exponent: log_moment / len,
                mode,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let success = g_grid
        .iter()
        .map(|&g| {
            let log_success = log_success_probability(&profile, g * len)?;
            Ok(SuccessExponent {
                g,
                log_success,
                exponent: -log_success / len,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EmpiricalExponents {
        length: n,
        moments,
        success,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src(p: &[f64]) -> CategoricalSource<f64> {
        CategoricalSource::new(p).unwrap()
    }

    #[test]
    fn compositions_are_enumerated_once() {
        let mut seen = Vec::new();
        for_each_composition(3, 3, |p| seen.push(p.to_vec()));
        assert_eq!(seen.len(), 10);
        assert_eq!(composition_count(3, 3), 10.0);
        let mut dedup = seen.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 10);
        assert!(seen.iter().all(|p| p.iter().sum::<u64>() == 3));
    }

    #[test]
    fn multinomials() {
        assert_eq!(binomial_u64(5, 2), Some(10));
        assert_eq!(multinomial_u64(4, &[1, 1, 2]), Some(12));
        assert_eq!(binomial_u64(100, 50), None);
        assert_eq!(binomial_u64(62, 31), Some(465_428_353_255_261_088));
    }

    #[test]
    fn binary_profile_counts() {
        let p = build_profile(&src(&[0.3, 0.7]), 3).unwrap();
        let counts: Vec<u64> = p.classes.iter().map(|c| c.count.unwrap()).collect();
        assert_eq!(counts, vec![1, 3, 3, 1]);
        let starts: Vec<u64> = p.classes.iter().map(|c| c.start.unwrap()).collect();
        assert_eq!(starts, vec![0, 1, 4, 7]);
        assert!(p.log_total_mass().abs() < 1e-12);
    }

    #[test]
    fn two_symbol_profile_probabilities() {
        let p = build_profile(&src(&[0.8, 0.2]), 2).unwrap();
        let probs: Vec<f64> = p.classes.iter().map(|c| c.log_prob.exp()).collect();
        assert!((probs[0] - 0.64).abs() < 1e-15);
        assert!((probs[1] - 0.16).abs() < 1e-15);
        assert!((probs[2] - 0.04).abs() < 1e-15);
        assert_eq!(p.classes[1].count, Some(2));
    }

    #[test]
    fn uniform_profile_merges_into_one_class() {
        let p = build_profile(&src(&[0.5, 0.5]), 5).unwrap();
        assert_eq!(p.classes.len(), 1);
        assert_eq!(p.classes[0].count, Some(32));
        let p = build_profile(&CategoricalSource::<f64>::uniform(3).unwrap(), 4).unwrap();
        assert_eq!(p.classes.len(), 1);
        assert_eq!(p.classes[0].count, Some(81));
        // partial ties: two equal symbols
        let p = build_profile(&src(&[0.2, 0.4, 0.4]), 2).unwrap();
        let counts: Vec<u64> = p.classes.iter().map(|c| c.count.unwrap()).collect();
        assert_eq!(counts, vec![4, 4, 1]);
    }

    #[test]
    fn guard_rejects_large_profiles() {
        let u = CategoricalSource::<f64>::uniform(10).unwrap();
        assert!(matches!(
            build_profile(&u, 100),
            Err(Error::TooManyClasses { .. })
        ));
        assert!(build_profile(&src(&[0.3, 0.7]), 0).is_err());
    }

    #[test]
    fn moment_examples() {
        let p = build_profile(&src(&[0.5, 0.5]), 2).unwrap();
        for mode in [MomentMode::ExactEnumerated, MomentMode::ExactInteger] {
            assert!((guesswork_moment(&p, 1.0, mode).unwrap().exp() - 2.5).abs() < 1e-14);
        }
        let p = build_profile(&src(&[0.8, 0.2]), 2).unwrap();
        for mode in [MomentMode::ExactEnumerated, MomentMode::ExactInteger] {
            assert!((guesswork_moment(&p, 1.0, mode).unwrap().exp() - 1.6).abs() < 1e-14);
        }
        // uniform ternary, n = 1, rho = 2: (1 + 4 + 9) / 3
        let p = build_profile(&CategoricalSource::<f64>::uniform(3).unwrap(), 1).unwrap();
        for mode in [MomentMode::ExactEnumerated, MomentMode::ExactInteger] {
            let m = guesswork_moment(&p, 2.0, mode).unwrap().exp();
            assert!((m - 14.0 / 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn faulhaber_matches_enumeration() {
        let p = build_profile(&src(&[0.15, 0.25, 0.6]), 7).unwrap();
        for rho in [1.0, 2.0, 3.0] {
            let a = guesswork_moment(&p, rho, MomentMode::ExactEnumerated).unwrap();
            let b = guesswork_moment(&p, rho, MomentMode::ExactInteger).unwrap();
            assert!(((a - b) / a).abs() < 1e-13, "{rho}: {a} {b}");
        }
    }

    #[test]
    fn mode_availability() {
        let p = build_profile(&src(&[0.3, 0.7]), 40).unwrap();
        assert!(matches!(
            guesswork_moment(&p, 1.0, MomentMode::ExactEnumerated),
            Err(Error::ModeUnavailable { .. })
        ));
        assert!(matches!(
            guesswork_moment(&p, 1.5, MomentMode::ExactInteger),
            Err(Error::ModeUnavailable { .. })
        ));
        assert_eq!(auto_mode(&p, 2.0), MomentMode::ExactInteger);
        assert_eq!(auto_mode(&p, 0.5), MomentMode::IntegralApprox);
        assert!(guesswork_moment(&p, 0.0, MomentMode::IntegralApprox).is_err());
    }

    #[test]
    fn moments_increase_with_rho() {
        let p = build_profile(&src(&[0.2, 0.3, 0.5]), 6).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for rho in [0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let (m, _) = guesswork_moment_auto(&p, rho).unwrap();
            assert!(m > prev);
            prev = m;
        }
    }

    #[test]
    fn integral_approx_is_accurate_for_large_classes() {
        // uniform binary, n = 16: one class of 65536 strings
        let p = build_profile(&src(&[0.5, 0.5]), 16).unwrap();
        for rho in [0.5, 1.0, 2.0, 3.0] {
            let exact = guesswork_moment(&p, rho, MomentMode::ExactEnumerated).unwrap().exp();
            let approx = guesswork_moment(&p, rho, MomentMode::IntegralApprox).unwrap().exp();
            assert!(((approx - exact) / exact).abs() <= 1e-6, "{rho}");
        }
    }

    #[test]
    fn success_examples() {
        let p = build_profile(&src(&[0.8, 0.2]), 2).unwrap();
        assert!((success_probability(&p, 0.0).unwrap() - 0.64).abs() < 1e-15);
        assert_eq!(success_probability(&p, 2.0 * 2f64.ln()).unwrap(), 1.0);
        assert_eq!(success_probability(&p, 10.0).unwrap(), 1.0);
        // N = 2 falls inside the second class
        assert!((success_probability(&p, 2f64.ln()).unwrap() - 0.8).abs() < 1e-15);
        // N = 3 closes it
        assert!((success_probability(&p, 3f64.ln()).unwrap() - 0.96).abs() < 1e-15);
        assert!(success_probability(&p, -1.0).is_err());
    }

    #[test]
    fn success_is_monotone_in_budget() {
        let p = build_profile(&src(&[0.1, 0.3, 0.6]), 8).unwrap();
        let mut prev = 0.0;
        for i in 0..=90 {
            let lb = i as f64 * 0.1;
            let s = success_probability(&p, lb).unwrap();
            assert!(s >= prev);
            prev = s;
        }
        assert_eq!(prev, 1.0);
    }

    #[test]
    fn query_budget_round_trips_integers() {
        for n in [1u64, 2, 3, 7, 1000, 123_456_789, 1 << 40] {
            let b = QueryBudget::<f64>::from_log((n as f64).ln()).unwrap();
            assert_eq!(b.exact, Some(n));
        }
        let b = QueryBudget::<f64>::from_log(2.5f64.ln()).unwrap();
        assert_eq!(b.exact, Some(2));
        let b = QueryBudget::<f64>::from_log(500.0).unwrap();
        assert_eq!(b.exact, None);
    }

    #[test]
    fn large_binary_profile() {
        let p = build_profile(&src(&[0.3, 0.7]), 2000).unwrap();
        assert_eq!(p.classes.len(), 2001);
        assert!(p.log_total_mass().abs() < 1e-9);
        let e = empirical_exponents(&src(&[0.5, 0.5]), 200, &[1.0], &[]).unwrap();
        assert!((e.moments[0].exponent - 2f64.ln()).abs() < 2.0 / 200.0);
    }
}
