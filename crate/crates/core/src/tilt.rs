//! Tilted families `τ(θ, α)_i ∝ θ_i^α`, the inversion `α(g)` of the family
//! entropy, and the large-deviations rate function of guesswork
//! `Λ*_θ(g) = D(τ(θ, α(g)) ‖ θ)`.
//!
//! All tilting happens in the log domain: `ln τ_i = α ln θ_i − lse(α ln θ)`,
//! so tilt orders in the thousands neither overflow nor underflow. Scalar
//! summaries (entropy, divergence) are taken from the exact log-domain
//! values; only the materialized distribution is floored at
//! [`MIN_PROB`](crate::source::MIN_PROB).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{bisect, log_sum_exp, neumaier_sum};
use crate::scalar::{tol, Real};
use crate::source::{renyi_from_log_weights, CategoricalSource, MIN_PROB};

/// Bisection cap for `α(g)`.
pub const MAX_BISECTION_ITERS: usize = 200;

/// Default entropy residual for `α(g)`.
pub const DEFAULT_ALPHA_TOL: f64 = 1e-10;

/// Default step of the finite-difference checks.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// One member of a tilted family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiltPoint<T> {
    pub alpha: T,
    pub dist: CategoricalSource<T>,
    /// `H(τ(θ, α))`
    pub entropy: T,
    /// `D(τ(θ, α) ‖ θ)`
    pub kl_to_base: T,
    /// Set when flooring at `MIN_PROB` moved an entry by more than 1e-9
    /// (relative).
    pub clamped: bool,
}

impl<T: Real> TiltPoint<T> {
    /// `α < 1`: more uniform than the base.
    pub fn is_high_entropy_member(&self) -> bool {
        self.alpha < T::one()
    }

    /// `α > 1`: less uniform than the base.
    pub fn is_low_entropy_member(&self) -> bool {
        self.alpha > T::one()
    }
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha >= T::zero()) || alpha.is_infinite() {
        return Err(Error::out_of_range("alpha", alpha.as_f64(), "[0, inf)"));
    }
    Ok(())
}

/// `ln τ_i(θ, α)` from `ln θ`.
pub(crate) fn tilted_log_probs<T: Real>(log_theta: &[T], alpha: T) -> Vec<T> {
    let w: Vec<T> = log_theta.iter().map(|&l| alpha * l).collect();
    let norm = log_sum_exp(&w);
    w.into_iter().map(|x| x - norm).collect()
}

/// Entropy of a distribution given by normalized log-probabilities.
pub(crate) fn entropy_of_log_probs<T: Real>(log_p: &[T]) -> T {
    neumaier_sum(log_p.iter().map(|&l| {
        let p = l.exp();
        if p > T::zero() {
            -p * l
        } else {
            T::zero()
        }
    }))
}

fn kl_of_log_probs<T: Real>(log_p: &[T], log_q: &[T]) -> T {
    let d = neumaier_sum(log_p.iter().zip(log_q).map(|(&lp, &lq)| {
        let p = lp.exp();
        if p > T::zero() {
            p * (lp - lq)
        } else {
            T::zero()
        }
    }));
    d.max(T::zero())
}

/// `τ(base, α)` with its entropy and divergence from the base.
pub fn tilt<T: Real>(base: &CategoricalSource<T>, alpha: T) -> Result<TiltPoint<T>> {
    check_alpha(alpha)?;
    let log_theta = base.log_probs();
    let log_tau = tilted_log_probs(&log_theta, alpha);
    let entropy = entropy_of_log_probs(&log_tau);
    let kl_to_base = kl_of_log_probs(&log_tau, &log_theta);

    let floor = T::lit(MIN_PROB);
    let raw: Vec<T> = log_tau.iter().map(|l| l.exp()).collect();
    let floored: Vec<T> = raw.iter().map(|&p| p.max(floor)).collect();
    let total = neumaier_sum(floored.iter().copied());
    let probs: Vec<T> = floored.iter().map(|&p| (p / total).max(floor)).collect();
    let report_tol = tol::<T>(1e-9);
    let clamped = raw
        .iter()
        .zip(&probs)
        .any(|(&r, &p)| r <= T::zero() || ((p - r) / r).abs() > report_tol);

    Ok(TiltPoint {
        alpha,
        dist: CategoricalSource::from_normalized(probs),
        entropy,
        kl_to_base,
        clamped,
    })
}

/// `D(p ‖ q) = Σ p_i ln(p_i / q_i)`.
pub fn kl_divergence<T: Real>(p: &CategoricalSource<T>, q: &CategoricalSource<T>) -> Result<T> {
    if p.alphabet_size() != q.alphabet_size() {
        return Err(Error::DimensionMismatch(p.alphabet_size(), q.alphabet_size()));
    }
    let d = neumaier_sum(
        p.probs()
            .iter()
            .zip(q.probs())
            .map(|(&a, &b)| a * (a / b).ln()),
    );
    Ok(d.max(T::zero()))
}

/// `H(τ(base, α))`. Errors on a uniform base, whose family is constant.
pub fn family_entropy<T: Real>(base: &CategoricalSource<T>, alpha: T) -> Result<T> {
    check_alpha(alpha)?;
    if base.is_uniform() {
        return Err(Error::UniformBase);
    }
    Ok(entropy_of_log_probs(&tilted_log_probs(&base.log_probs(), alpha)))
}

/// Open interval of entropies reached by the tilted family for `α ∈ (0, ∞)`:
/// `(ln m, ln |X|)` where `m` counts the maximal entries of the base.
pub fn entropy_range<T: Real>(base: &CategoricalSource<T>) -> (T, T) {
    let m = T::from_usize(base.max_multiplicity()).unwrap();
    let k = T::from_usize(base.alphabet_size()).unwrap();
    (m.ln(), k.ln())
}

/// Solves `H(τ(base, α)) = g` for `α ≥ 0` by bisection.
///
/// The upper bracket starts at 1 and doubles until the family entropy drops
/// below `g`; the family entropy is strictly decreasing in `α` for a
/// non-uniform base, so the result is unique and deterministic.
pub fn solve_alpha_for_entropy<T: Real>(base: &CategoricalSource<T>, g: T, tol_h: T) -> Result<T> {
    if base.is_uniform() {
        return Err(Error::UniformBase);
    }
    solve_alpha_logs(&base.log_probs(), entropy_range(base), g, tol_h)
}

/// [`solve_alpha_for_entropy`] on a non-uniform base given by its
/// log-probabilities and attainable range.
pub(crate) fn solve_alpha_logs<T: Real>(log_theta: &[T], range: (T, T), g: T, tol_h: T) -> Result<T> {
    let (lo_h, hi_h) = range;
    if !(g > lo_h && g < hi_h) {
        return Err(Error::OutOfEntropyRange {
            g: g.as_f64(),
            lo: lo_h.as_f64(),
            hi: hi_h.as_f64(),
        });
    }
    let residual = |a: T| entropy_of_log_probs(&tilted_log_probs(log_theta, a)) - g;

    let mut hi = T::one();
    let limit = T::lit(2f64.powi(80));
    while residual(hi) >= T::zero() {
        hi = hi * T::lit(2.0);
        if hi > limit {
            return Err(Error::NoConvergence(residual(hi).as_f64()));
        }
    }
    let lo = if hi > T::one() { hi / T::lit(2.0) } else { T::zero() };
    let sol = bisect(residual, lo, hi, tol_h, MAX_BISECTION_ITERS);
    if sol.residual > tol_h.max(tol::<T>(1e-9)) {
        return Err(Error::NoConvergence(sol.residual.as_f64()));
    }
    Ok(sol.root)
}

/// `Λ*_θ(g) = D(τ(θ, α(g)) ‖ θ)`. For the uniform source the closed form
/// `ln |X| − g` is used.
pub fn rate_function<T: Real>(base: &CategoricalSource<T>, g: T) -> Result<T> {
    if base.is_uniform() {
        let hi = T::from_usize(base.alphabet_size()).unwrap().ln();
        if !(g >= T::zero() && g <= hi) {
            return Err(Error::OutOfEntropyRange {
                g: g.as_f64(),
                lo: 0.0,
                hi: hi.as_f64(),
            });
        }
        return Ok(hi - g);
    }
    rate_function_logs(&base.log_probs(), entropy_range(base), g)
}

/// [`rate_function`] on a non-uniform base given by its log-probabilities.
/// Lets tilted bases skip the probability floor.
pub(crate) fn rate_function_logs<T: Real>(log_theta: &[T], range: (T, T), g: T) -> Result<T> {
    let alpha = solve_alpha_logs(log_theta, range, g, T::lit(DEFAULT_ALPHA_TOL))?;
    Ok(kl_of_log_probs(&tilted_log_probs(log_theta, alpha), log_theta))
}

/// One [`TiltPoint`] per requested `α`, in input order.
pub fn family_scan<T: Real>(base: &CategoricalSource<T>, alphas: &[T]) -> Result<Vec<TiltPoint<T>>> {
    alphas.par_iter().map(|&a| tilt(base, a)).collect()
}

/// Cross-entropy `H(p ‖ q) = Σ p_i ln(1/q_i)` from log-probabilities.
fn cross_entropy_logs<T: Real>(log_p: &[T], log_q: &[T]) -> T {
    neumaier_sum(log_p.iter().zip(log_q).map(|(&lp, &lq)| -lp.exp() * lq))
}

/// `V(p ‖ q) = Σ p_i (ln(1/q_i) − H(p ‖ q))²`.
fn cross_varentropy_logs<T: Real>(log_p: &[T], log_q: &[T]) -> T {
    let h = cross_entropy_logs(log_p, log_q);
    neumaier_sum(
        log_p
            .iter()
            .zip(log_q)
            .map(|(&lp, &lq)| lp.exp() * (-lq - h).powi(2)),
    )
}

/// A single finite-difference identity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeCheck<T> {
    pub name: &'static str,
    pub finite_difference: T,
    pub closed_form: T,
    pub residual: T,
    pub tolerance: T,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport<T> {
    pub step: T,
    pub checks: Vec<DerivativeCheck<T>>,
}

impl<T: Real> DerivativeReport<T> {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Checks five derivative identities of tilted families at `α = β = 1`
/// against central finite differences:
///
/// | quantity | closed form |
/// |---|---|
/// | `∂α H(τ(θ,α))` | `−V` |
/// | `∂β H_β(θ)` | `−V/2` |
/// | `∂α∂β H_β(τ(θ,α))` | `−V + S/2` |
/// | `∂α V(τ(θ,α) ‖ θ)` | `−S` |
/// | `∂α∂β H(τ(θ,αβ))` | `−2V + S` |
///
/// Mixed partials use the four-point cross stencil. Each residual must be
/// within `max(1e-6, 1e-3·|closed form|)`.
pub fn derivative_checks<T: Real>(base: &CategoricalSource<T>, step: T) -> Result<DerivativeReport<T>> {
    if !(step > T::zero() && step < T::lit(0.5)) {
        return Err(Error::out_of_range("step", step.as_f64(), "(0, 0.5)"));
    }
    let smallest = base.probs().iter().copied().fold(T::one(), T::min);
    if smallest < T::lit(1e-6) {
        return Err(Error::IllConditioned(smallest.as_f64()));
    }
    let sec = base.sec_report();
    let (v, s) = (sec.varentropy, sec.skewentropy);
    let log_theta = base.log_probs();
    let one = T::one();
    let two = T::lit(2.0);
    let h = step;

    let fam_h = |a: T| entropy_of_log_probs(&tilted_log_probs(&log_theta, a));
    // H_β(τ(θ,α)): the tilt only rescales the log weights
    let renyi_tilt = |a: T, b: T| {
        let w: Vec<T> = log_theta.iter().map(|&l| a * l).collect();
        renyi_from_log_weights(&w, b)
    };
    let cross_v = |a: T| cross_varentropy_logs(&tilted_log_probs(&log_theta, a), &log_theta);
    let central = |f: &dyn Fn(T) -> T| (f(one + h) - f(one - h)) / (two * h);
    let cross = |f: &dyn Fn(T, T) -> T| {
        (f(one + h, one + h) - f(one + h, one - h) - f(one - h, one + h) + f(one - h, one - h))
            / (T::lit(4.0) * h * h)
    };

    let estimates = [
        ("dH_tilt_dalpha", central(&fam_h), -v),
        ("dRenyi_dbeta", central(&|b| renyi_tilt(one, b)), -v / two),
        ("d2Renyi_tilt_dalpha_dbeta", cross(&renyi_tilt), -v + s / two),
        ("dCrossVarentropy_dalpha", central(&cross_v), -s),
        ("d2H_tilt_product_dalpha_dbeta", cross(&|a, b| fam_h(a * b)), -two * v + s),
    ];
    let checks = estimates
        .into_iter()
        .map(|(name, fd, closed)| {
            let residual = (fd - closed).abs();
            let tolerance = T::lit(1e-6).max(T::lit(1e-3) * closed.abs());
            DerivativeCheck {
                name,
                finite_difference: fd,
                closed_form: closed,
                residual,
                tolerance,
                passed: residual <= tolerance,
            }
        })
        .collect();
    Ok(DerivativeReport { step, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src(p: &[f64]) -> CategoricalSource<f64> {
        CategoricalSource::new(p).unwrap()
    }

    #[test]
    fn identity_and_uniform_tilts() {
        let b = src(&[0.1, 0.2, 0.7]);
        let t = tilt(&b, 1.0).unwrap();
        for (x, y) in t.dist.probs().iter().zip(b.probs()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(t.kl_to_base <= 1e-12);
        assert!(!t.clamped);
        let t = tilt(&b, 0.0).unwrap();
        for x in t.dist.probs() {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((t.entropy - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn tilt_of_order_two() {
        let t = tilt(&src(&[0.1, 0.2, 0.7]), 2.0).unwrap();
        let expect = [0.01 / 0.54, 0.04 / 0.54, 0.49 / 0.54];
        for (x, y) in t.dist.probs().iter().zip(expect) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!((t.dist.probs()[0] - 0.018_518_518_518_518_52).abs() < 1e-15);
        assert!(t.is_low_entropy_member());
    }

    #[test]
    fn extreme_tilt_stays_valid() {
        let t = tilt(&src(&[0.1, 0.2, 0.7]), 1000.0).unwrap();
        assert!(t.clamped);
        assert!(t.dist.probs().iter().all(|&p| p >= MIN_PROB));
        assert!(t.entropy >= 0.0 && t.entropy < 1e-100);
        assert!(tilt(&src(&[0.5, 0.5]), -1.0).is_err());
    }

    #[test]
    fn kl_examples() {
        let u = src(&[0.5, 0.5]);
        let q = src(&[0.25, 0.75]);
        assert_eq!(kl_divergence(&q, &q).unwrap(), 0.0);
        assert!((kl_divergence(&u, &q).unwrap() - 0.143_841_036_225_890_46).abs() < 1e-15);
        assert!((kl_divergence(&q, &u).unwrap() - 0.130_812_035_941_136_96).abs() < 1e-15);
        let d = 2f64.ln() - q.shannon_entropy();
        assert!((kl_divergence(&q, &u).unwrap() - d).abs() < 1e-15);
        assert_eq!(
            kl_divergence(&u, &src(&[0.2, 0.3, 0.5])),
            Err(Error::DimensionMismatch(2, 3))
        );
    }

    #[test]
    fn family_entropy_examples() {
        let b = src(&[0.1, 0.2, 0.7]);
        assert!((family_entropy(&b, 0.0).unwrap() - 3f64.ln()).abs() < 1e-14);
        assert!((family_entropy(&b, 1.0).unwrap() - b.shannon_entropy()).abs() < 1e-14);
        let h10 = family_entropy(&b, 10.0).unwrap();
        // direct evaluation of the tilted vector
        let w: Vec<f64> = b.probs().iter().map(|p| p.powi(10)).collect();
        let z: f64 = w.iter().sum();
        let direct: f64 = w.iter().map(|x| -(x / z) * (x / z).ln()).sum();
        assert!((h10 - direct).abs() < 1e-14);
        assert!(h10 < 1e-3 && h10 > 0.0);
        assert_eq!(family_entropy(&src(&[1.0, 1.0]), 2.0), Err(Error::UniformBase));
    }

    #[test]
    fn solve_alpha_examples() {
        let b = src(&[0.3, 0.7]);
        let a = solve_alpha_for_entropy(&b, b.shannon_entropy(), 1e-10).unwrap();
        assert!((a - 1.0).abs() < 1e-9);
        let a = solve_alpha_for_entropy(&b, 2f64.ln() - 1e-9, 1e-10).unwrap();
        assert!(a < 1e-3);
        let a = solve_alpha_for_entropy(&b, 0.5, 1e-10).unwrap();
        assert!((family_entropy(&b, a).unwrap() - 0.5).abs() <= 1e-10);
        assert!(matches!(
            solve_alpha_for_entropy(&b, 0.8, 1e-10),
            Err(Error::OutOfEntropyRange { .. })
        ));
        assert!(matches!(
            solve_alpha_for_entropy(&b, 0.0, 1e-10),
            Err(Error::OutOfEntropyRange { .. })
        ));
        // tied maxima: the family never drops below ln 2
        let tied = src(&[0.1, 0.45, 0.45]);
        assert!(solve_alpha_for_entropy(&tied, 0.6, 1e-10).is_err());
        assert!(solve_alpha_for_entropy(&tied, 0.7, 1e-10).is_ok());
    }

    #[test]
    fn rate_function_examples() {
        let b = src(&[0.3, 0.7]);
        assert!(rate_function(&b, b.shannon_entropy()).unwrap() < 1e-12);
        let r = rate_function(&b, 0.4).unwrap();
        assert!(r > 0.0);
        let u = CategoricalSource::<f64>::uniform(3).unwrap();
        assert!((rate_function(&u, 0.5).unwrap() - (3f64.ln() - 0.5)).abs() < 1e-15);
        assert!(rate_function(&u, 2.0).is_err());
    }

    #[test]
    fn scan_preserves_order() {
        let b = src(&[0.1, 0.2, 0.7]);
        let pts = family_scan(&b, &[1.0]).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].alpha, 1.0);
        let pts = family_scan(&b, &[0.0, 1.0]).unwrap();
        assert!((pts[0].entropy - 3f64.ln()).abs() < 1e-14);
        assert!((pts[1].entropy - b.shannon_entropy()).abs() < 1e-14);
        let alphas: Vec<f64> = (0..=20).map(|i| 0.1 * 100f64.powf(i as f64 / 20.0)).collect();
        let pts = family_scan(&b, &alphas).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].entropy < w[0].entropy);
        }
    }

    #[test]
    fn derivative_identities() {
        for p in [&[0.3, 0.7][..], &[0.1, 0.2, 0.7], &[0.33, 0.33, 0.34]] {
            let rep = derivative_checks(&src(p), DEFAULT_FD_STEP).unwrap();
            for c in &rep.checks {
                assert!(c.passed, "{p:?} {c:?}");
            }
        }
        assert!(matches!(
            derivative_checks(&src(&[1e-7, 1.0]), 1e-4),
            Err(Error::IllConditioned(_))
        ));
    }
}
