//! Categorical (memoryless) sources and their single-letter information
//! measures: Shannon and Renyi entropy, varentropy, skewentropy and the
//! skewentropy condition (SEC).
//!
//! Every quantity is in nats. The information random variable of a source
//! `θ` takes the value `ln(1/θ_i)` with probability `θ_i`; its mean, variance
//! and third central moment are the entropy `H`, varentropy `V` and
//! skewentropy `S`. A source satisfies the SEC when `V² + 2HV − HS > 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, neumaier_sum};
use crate::scalar::{tol, Real};

/// Smallest admissible probability after normalization.
pub const MIN_PROB: f64 = 1e-12;

/// Renyi orders closer than this to 1 are routed to the Shannon entropy.
pub const ORDER_ONE_TOL: f64 = 1e-9;

/// Two entries closer than this (relative) count as equal.
const UNIFORM_TOL: f64 = 1e-12;

/// A validated probability vector with every entry in `[MIN_PROB, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoricalSource<T> {
    probs: Vec<T>,
}

impl<T: Real> CategoricalSource<T> {
    /// Normalizes nonnegative weights into a source.
    ///
    /// Rejects fewer than two symbols and any entry that ends up below
    /// [`MIN_PROB`]; such a source sits on the boundary of the simplex.
    pub fn new(weights: &[T]) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::EmptyOrSingleton(weights.len()));
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < T::zero() {
                return Err(Error::InvalidWeight {
                    index,
                    value: w.as_f64(),
                });
            }
        }
        let total = neumaier_sum(weights.iter().copied());
        if total <= T::zero() {
            return Err(Error::ZeroMass);
        }
        let floor = T::lit(MIN_PROB);
        let probs: Vec<T> = weights.iter().map(|&w| w / total).collect();
        if let Some((index, &value)) = probs.iter().enumerate().find(|(_, &p)| p < floor) {
            return Err(Error::NonPositiveEntry {
                index,
                value: value.as_f64(),
                floor: MIN_PROB,
            });
        }
        Ok(Self { probs })
    }

    /// The uniform source on `size` symbols.
    pub fn uniform(size: usize) -> Result<Self> {
        Self::new(&vec![T::one(); size])
    }

    /// The binary source `(phi, 1 - phi)`.
    pub fn binary(phi: T) -> Result<Self> {
        if !(phi > T::zero() && phi < T::one()) {
            return Err(Error::out_of_range("phi", phi.as_f64(), "(0, 1)"));
        }
        Self::new(&[phi, T::one() - phi])
    }

    /// Builds a source from probabilities that are already normalized and
    /// floored (tilting output).
    pub(crate) fn from_normalized(probs: Vec<T>) -> Self {
        debug_assert!(probs.len() >= 2);
        Self { probs }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    /// Natural logs of the probabilities.
    pub fn log_probs(&self) -> Vec<T> {
        self.probs.iter().map(|p| p.ln()).collect()
    }

    /// True when every entry equals `1/|X|` up to a relative `1e-12`.
    pub fn is_uniform(&self) -> bool {
        let k = T::from_usize(self.probs.len()).unwrap();
        let u = T::one() / k;
        let t = tol::<T>(UNIFORM_TOL);
        self.probs.iter().all(|&p| ((p - u) / u).abs() <= t)
    }

    /// Number of entries tied (relative `1e-12`) with the largest one.
    pub fn max_multiplicity(&self) -> usize {
        let max = self.probs.iter().copied().fold(T::zero(), T::max);
        let t = tol::<T>(UNIFORM_TOL);
        self.probs.iter().filter(|&&p| (max - p) / max <= t).count()
    }

    /// `H(θ) = Σ θ_i ln(1/θ_i)`.
    pub fn shannon_entropy(&self) -> T {
        neumaier_sum(self.probs.iter().map(|&p| -p * p.ln()))
    }

    /// Renyi entropy of the given order; an order within `1e-9` of 1 is
    /// answered with the Shannon entropy, `+inf` gives the min-entropy.
    pub fn renyi_entropy(&self, order: T) -> Result<T> {
        check_order(order)?;
        if (order - T::one()).abs() <= T::lit(ORDER_ONE_TOL) {
            return Ok(self.shannon_entropy());
        }
        Ok(renyi_from_log_weights(&self.log_probs(), order))
    }

    /// Renyi entropy without routing at order 1.
    pub fn renyi_entropy_strict(&self, order: T) -> Result<T> {
        check_order(order)?;
        if (order - T::one()).abs() <= T::lit(ORDER_ONE_TOL) {
            return Err(Error::OrderAtOne(order.as_f64()));
        }
        Ok(renyi_from_log_weights(&self.log_probs(), order))
    }

    /// Central moment of order `power` of the information random variable.
    fn info_central_moment(&self, power: i32) -> T {
        if self.is_uniform() {
            return T::zero();
        }
        let h = self.shannon_entropy();
        neumaier_sum(self.probs.iter().map(|&p| p * (-p.ln() - h).powi(power)))
    }

    /// `V(θ)`: variance of the information random variable.
    pub fn varentropy(&self) -> T {
        self.info_central_moment(2)
    }

    /// `S(θ)`: third central moment of the information random variable.
    pub fn skewentropy(&self) -> T {
        self.info_central_moment(3)
    }

    pub fn sec_report(&self) -> SecReport<T> {
        SecReport::from_moments(self.shannon_entropy(), self.varentropy(), self.skewentropy())
    }
}

impl CategoricalSource<f64> {
    /// Parses whitespace or comma separated weights.
    pub fn parse(text: &str) -> Result<Self> {
        let mut weights = Vec::new();
        for (index, tok) in text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .enumerate()
        {
            let value: f64 = tok.parse().map_err(|_| Error::InvalidWeight {
                index,
                value: f64::NAN,
            })?;
            weights.push(value);
        }
        Self::new(&weights)
    }
}

fn check_order<T: Real>(order: T) -> Result<()> {
    if order.is_nan() || order < T::zero() {
        return Err(Error::out_of_range("order", order.as_f64(), "[0, inf]"));
    }
    Ok(())
}

/// Renyi entropy of the distribution proportional to `exp(w_i)`.
///
/// Near order 1 the log-partition difference is evaluated through
/// `ln_1p`/`exp_m1` so that the result keeps full relative precision; the
/// finite-difference checks in [`crate::tilt`] depend on this.
pub(crate) fn renyi_from_log_weights<T: Real>(w: &[T], order: T) -> T {
    let max = w.iter().copied().fold(T::neg_infinity(), T::max);
    let z: Vec<T> = w.iter().map(|&x| x - max).collect();
    if order.is_infinite() {
        // min-entropy: -ln max_i p_i
        return log_sum_exp(&z);
    }
    let log_partition = log_sum_exp(&z);
    let delta = order - T::one();
    if delta.abs() > T::lit(0.5) {
        let scaled: Vec<T> = z.iter().map(|&x| order * x).collect();
        return (log_sum_exp(&scaled) - order * log_partition) / (T::one() - order);
    }
    // Z_order = Z + Σ e^{z_i} expm1((order-1) z_i)
    let partition = neumaier_sum(z.iter().map(|&x| x.exp()));
    let correction = neumaier_sum(z.iter().map(|&x| x.exp() * (delta * x).exp_m1()));
    let numerator = (correction / partition).ln_1p() - delta * log_partition;
    numerator / (T::one() - order)
}

/// Entropy, varentropy, skewentropy and the SEC margin of a source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecReport<T> {
    pub shannon: T,
    pub varentropy: T,
    pub skewentropy: T,
    /// `V² + 2HV − HS`
    pub margin: T,
    pub satisfies_sec: bool,
}

impl<T: Real> SecReport<T> {
    pub fn from_moments(shannon: T, varentropy: T, skewentropy: T) -> Self {
        let margin = varentropy * varentropy + T::lit(2.0) * shannon * varentropy
            - shannon * skewentropy;
        Self {
            shannon,
            varentropy,
            skewentropy,
            margin,
            satisfies_sec: margin > T::zero(),
        }
    }
}

/// Closed-form `(H, V, S)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoMoments<T> {
    pub entropy: T,
    pub varentropy: T,
    pub skewentropy: T,
}

/// Binary entropy `h(x) = x ln(1/x) + (1-x) ln(1/(1-x))`.
pub fn binary_entropy<T: Real>(x: T) -> T {
    let y = T::one() - x;
    let a = if x > T::zero() { -x * x.ln() } else { T::zero() };
    let b = if y > T::zero() { -y * y.ln() } else { T::zero() };
    a + b
}

/// Closed forms for the binary source with minority probability `phi`.
pub fn binary_closed_forms<T: Real>(phi: T) -> Result<InfoMoments<T>> {
    let half = T::lit(0.5);
    if !(phi > T::zero() && phi < half) {
        return Err(Error::out_of_range("phi", phi.as_f64(), "(0, 0.5)"));
    }
    let q = T::one() - phi;
    let spread = (q / phi).ln();
    let pq = phi * q;
    Ok(InfoMoments {
        entropy: binary_entropy(phi),
        varentropy: pq * spread.powi(2),
        skewentropy: pq * (T::one() - T::lit(2.0) * phi) * spread.powi(3),
    })
}

fn check_construction<T: Real>(alphabet_size: usize, eps: T) -> Result<()> {
    if alphabet_size < 3 {
        return Err(Error::out_of_range(
            "alphabet_size",
            alphabet_size as f64,
            "[3, inf)",
        ));
    }
    let k = T::from_usize(alphabet_size).unwrap();
    if !(eps > T::zero() && eps < T::one() / k) {
        return Err(Error::out_of_range("eps", eps.as_f64(), "(0, 1/|X|)"));
    }
    Ok(())
}

/// The source `((1−ε)/(|X|−1), …, (1−ε)/(|X|−1), ε)`: near-uniform on all
/// but one symbol, which is almost missing.
pub fn construction_source<T: Real>(alphabet_size: usize, eps: T) -> Result<CategoricalSource<T>> {
    check_construction(alphabet_size, eps)?;
    let k1 = T::from_usize(alphabet_size - 1).unwrap();
    let mut w = vec![(T::one() - eps) / k1; alphabet_size - 1];
    w.push(eps);
    CategoricalSource::new(&w)
}

/// Closed forms for [`construction_source`].
pub fn construction_closed_forms<T: Real>(alphabet_size: usize, eps: T) -> Result<InfoMoments<T>> {
    check_construction(alphabet_size, eps)?;
    let log_k1 = T::from_usize(alphabet_size - 1).unwrap().ln();
    let q = T::one() - eps;
    let spread = (q / eps).ln() - log_k1;
    let pq = eps * q;
    Ok(InfoMoments {
        entropy: q * log_k1 + binary_entropy(eps),
        varentropy: pq * spread.powi(2),
        skewentropy: pq * (T::one() - T::lit(2.0) * eps) * spread.powi(3),
    })
}
