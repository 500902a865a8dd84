//! Log-domain arithmetic, compensated summation and monotone bisection.

use crate::scalar::Real;

/// `ln(Σ exp(x_i))`, stable for large magnitudes. Empty input gives `-inf`.
pub fn log_sum_exp<T: Real>(xs: &[T]) -> T {
    let max = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() || !max.is_finite() {
        return max;
    }
    let sum = neumaier_sum(xs.iter().map(|&x| (x - max).exp()));
    max + sum.ln()
}

/// `ln(exp(a) + exp(b))`.
#[inline]
pub fn log_add<T: Real>(a: T, b: T) -> T {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == T::neg_infinity() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(1 - exp(x))` for `x <= 0`, accurate across the whole range.
#[inline]
pub fn ln_one_minus_exp<T: Real>(x: T) -> T {
    if x > -T::LN_2() {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(exp(a) - exp(b))` for `a >= b`; `-inf` when equal.
#[inline]
pub fn log_sub<T: Real>(a: T, b: T) -> T {
    if b == T::neg_infinity() {
        return a;
    }
    if b >= a {
        return T::neg_infinity();
    }
    a + ln_one_minus_exp(b - a)
}

/// `ln((B + D)^e - B^e)` given `ln B`, `ln D` and an exponent `e > 0`.
///
/// Stays accurate when `D` is many orders of magnitude smaller or larger
/// than `B`, where subtracting the two powers directly would cancel.
pub fn log_power_gap<T: Real>(log_base: T, log_incr: T, exponent: T) -> T {
    if log_base == T::neg_infinity() {
        return exponent * log_incr;
    }
    // ratio x = D / B
    let log_ratio = log_incr - log_base;
    let gap = if log_ratio < T::lit(-30.0) {
        // (1+x)^e - 1 = e x (1 + (e-1) x / 2 + ...)
        let x = log_ratio.exp();
        exponent.ln() + log_ratio + ((exponent - T::one()) * x / T::lit(2.0)).ln_1p()
    } else if log_ratio > T::lit(30.0) {
        // (1+x)^e - 1 = x^e (1 + 1/x)^e - 1
        let log_top = exponent * (log_ratio + (-log_ratio).exp().ln_1p());
        log_sub(log_top, T::zero())
    } else {
        (exponent * log_ratio.exp().ln_1p()).exp_m1().ln()
    };
    exponent * log_base + gap
}

/// Neumaier-compensated sum; the result is independent of thread count
/// because callers always feed it in a fixed order.
pub fn neumaier_sum<T: Real, I: IntoIterator<Item = T>>(xs: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Outcome of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection<T> {
    pub root: T,
    pub residual: T,
    pub iterations: usize,
}

/// Bisection for `f(x) = 0` on `[lo, hi]` where `f(lo)` and `f(hi)` have
/// opposite signs. Stops when `|f| <= ftol` or the bracket collapses.
pub fn bisect<T: Real, F: Fn(T) -> T>(
    f: F,
    mut lo: T,
    mut hi: T,
    ftol: T,
    max_iter: usize,
) -> Bisection<T> {
    let f_lo = f(lo);
    let lo_negative = f_lo < T::zero();
    let mut best = Bisection {
        root: lo,
        residual: f_lo.abs(),
        iterations: 0,
    };
    let f_hi = f(hi);
    if f_hi.abs() < best.residual {
        best = Bisection {
            root: hi,
            residual: f_hi.abs(),
            iterations: 0,
        };
    }
    for it in 1..=max_iter {
        if best.residual <= ftol {
            break;
        }
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm.abs() < best.residual {
            best = Bisection {
                root: mid,
                residual: fm.abs(),
                iterations: it,
            };
        }
        if (fm < T::zero()) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
        best.iterations = it;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_handles_extremes() {
        let v = log_sum_exp(&[1000.0f64, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp::<f64>(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 0.0]), 0.0);
    }

    #[test]
    fn log_sub_inverts_log_add() {
        let a = 3.5f64;
        let b = 1.25f64;
        let s = log_add(a, b);
        assert!((log_sub(s, b) - a).abs() < 1e-14);
        assert_eq!(log_sub(a, a), f64::NEG_INFINITY);
    }

    #[test]
    fn power_gap_matches_direct_evaluation() {
        for &(b, d, e) in &[(3.0f64, 5.0, 1.5), (100.0, 1.0, 2.0), (0.5, 1e9, 3.0), (7.0, 7.0, 0.5)] {
            let direct = ((b + d).powf(e) - b.powf(e)).ln();
            let got = log_power_gap(b.ln(), d.ln(), e);
            assert!((got - direct).abs() < 1e-12, "{b} {d} {e}: {got} vs {direct}");
        }
        // tiny increment relative to base: (B+1)^2 - B^2 = 2B + 1
        let lb = 700.0f64;
        let got = log_power_gap(lb, 0.0, 2.0);
        assert!((got - (2f64.ln() + lb)).abs() < 1e-12);
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s = neumaier_sum([1.0f64, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14, 200);
        assert!((r.root - 2f64.sqrt()).abs() < 1e-13);
    }
}
