//! Brute-force reference: enumerate and sort every string of length `n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::neumaier_sum;
use crate::scalar::Real;
use crate::source::CategoricalSource;

use super::DEFAULT_MAX_ORACLE;

/// How strings of equal probability are ordered among themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieOrder {
    Lexicographic,
    ReverseLexicographic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult<T> {
    /// `E[G^ρ]` per requested `ρ`, not in log form.
    pub moments: Vec<T>,
    /// `P[G ≤ N]` per requested budget.
    pub success: Vec<T>,
}

/// String probabilities in guessing order.
///
/// Each probability is computed from the symbol counts, so strings in the
/// same type class compare exactly equal and are ordered by `order`.
pub fn ranked_string_probabilities<T: Real>(
    base: &CategoricalSource<T>,
    n: u32,
    order: TieOrder,
) -> Result<Vec<T>> {
    let k = base.alphabet_size();
    let total = (k as f64).powi(n as i32);
    if n == 0 || total > DEFAULT_MAX_ORACLE as f64 {
        return Err(Error::TooLarge {
            count: total,
            limit: DEFAULT_MAX_ORACLE,
        });
    }
    let total = total as usize;
    let probs = base.probs();
    let mut counts = vec![0i32; k];
    let mut strings: Vec<(T, usize)> = (0..total)
        .map(|index| {
            counts.iter_mut().for_each(|c| *c = 0);
            let mut rest = index;
            for _ in 0..n {
                counts[rest % k] += 1;
                rest /= k;
            }
            let p = counts
                .iter()
                .zip(probs)
                .fold(T::one(), |acc, (&c, &q)| acc * q.powi(c));
            (p, index)
        })
        .collect();
    strings.sort_by(|a, b| {
        b.0.total_cmp(&a.0).then_with(|| match order {
            TieOrder::Lexicographic => a.1.cmp(&b.1),
            TieOrder::ReverseLexicographic => b.1.cmp(&a.1),
        })
    });
    Ok(strings.into_iter().map(|(p, _)| p).collect())
}

/// Moments and success probabilities by direct enumeration.
pub fn brute_force_oracle<T: Real>(
    base: &CategoricalSource<T>,
    n: u32,
    rhos: &[T],
    budgets: &[u64],
    order: TieOrder,
) -> Result<OracleResult<T>> {
    let ranked = ranked_string_probabilities(base, n, order)?;
    let moments = rhos
        .iter()
        .map(|&rho| {
            neumaier_sum(
                ranked
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| p * T::from_usize(i + 1).unwrap().powf(rho)),
            )
        })
        .collect();
    let success = budgets
        .iter()
        .map(|&b| {
            let upto = (b as usize).min(ranked.len());
            neumaier_sum(ranked[..upto].iter().copied()).min(T::one())
        })
        .collect();
    Ok(OracleResult { moments, success })
}
