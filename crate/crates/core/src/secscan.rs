//! SEC analysis over the probability simplex: lattice scans of the ternary
//! simplex, the near-uniform sufficient condition, failure witnesses and
//! seeded random sampling for larger alphabets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::source::{construction_source, CategoricalSource, SecReport};

/// Smallest barycentric coordinate kept by [`scan_simplex`].
pub const MIN_GRID_MARGIN: f64 = 1e-4;
/// Largest number of lattice points a scan may evaluate.
pub const MAX_SCAN_POINTS: u64 = 10_000_000;
/// Information deviation below which the SEC is certified.
pub const CERTIFICATE_BOUND: f64 = 2.0;
/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5EC5_CA17;

/// Witness search grid `{1e-2, 1e-3, …, 1e-9}`.
pub fn witness_eps_grid() -> Vec<f64> {
    (2..=9).map(|e| 10f64.powi(-e)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SecLabel {
    Pass,
    /// Non-uniform source with `V² + 2HV − HS ≤ 0`.
    FailMargin,
    /// The uniform source, where `V = S = 0`.
    FailDegenerate,
}

impl SecLabel {
    pub fn of<T: Real>(theta: &CategoricalSource<T>, report: &SecReport<T>) -> Self {
        if theta.is_uniform() {
            SecLabel::FailDegenerate
        } else if report.satisfies_sec {
            SecLabel::Pass
        } else {
            SecLabel::FailMargin
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SecLabel::Pass => "pass",
            SecLabel::FailMargin => "fail_margin",
            SecLabel::FailDegenerate => "fail_degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint<T> {
    /// Lattice coordinates; `theta_i = lattice_i / resolution`.
    pub lattice: Vec<u32>,
    pub theta: CategoricalSource<T>,
    pub report: SecReport<T>,
    pub label: SecLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexGrid<T> {
    pub resolution: u32,
    pub dimension: usize,
    /// Lexicographic in the lattice coordinates.
    pub points: Vec<GridPoint<T>>,
}

impl<T: Real> SimplexGrid<T> {
    pub fn count(&self, label: SecLabel) -> usize {
        self.points.iter().filter(|p| p.label == label).count()
    }
}

fn min_lattice_part(resolution: u32) -> u32 {
    ((MIN_GRID_MARGIN * resolution as f64).ceil() as u32).max(1)
}

/// Number of lattice points with every coordinate at least the grid margin.
pub fn interior_point_count(resolution: u32, dimension: usize) -> u64 {
    let c = min_lattice_part(resolution) as u64;
    let need = c * dimension as u64;
    if (resolution as u64) < need {
        return 0;
    }
    // compositions of the slack into `dimension` nonnegative parts
    let slack = resolution as u64 - need;
    let r = dimension as u64 - 1;
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (slack + r - i) as u128 / (i + 1) as u128;
    }
    acc.min(u64::MAX as u128) as u64
}

/// Evaluates the SEC at every interior lattice point of the ternary simplex.
pub fn scan_simplex<T: Real>(resolution: u32, dimension: usize) -> Result<SimplexGrid<T>> {
    scan_simplex_with(resolution, dimension, MAX_SCAN_POINTS)
}

pub fn scan_simplex_with<T: Real>(resolution: u32, dimension: usize, max_points: u64) -> Result<SimplexGrid<T>> {
    if dimension != 3 {
        return Err(Error::out_of_range("dimension", dimension as f64, "{3}"));
    }
    if resolution < 10 {
        return Err(Error::out_of_range("resolution", resolution as f64, "[10, inf)"));
    }
    let points = interior_point_count(resolution, dimension);
    if points > max_points {
        return Err(Error::ResourceGuard {
            points,
            limit: max_points,
        });
    }
    let c = min_lattice_part(resolution);
    let mut lattice = Vec::with_capacity(points as usize);
    for i in c..=resolution - 2 * c {
        for j in c..=resolution - i - c {
            lattice.push([i, j, resolution - i - j]);
        }
    }
    let m = T::from_u32(resolution).unwrap();
    let points = lattice
        .par_iter()
        .map(|l| {
            let probs: Vec<T> = l.iter().map(|&x| T::from_u32(x).unwrap() / m).collect();
            let theta = CategoricalSource::new(&probs)?;
            let report = theta.sec_report();
            Ok(GridPoint {
                lattice: l.to_vec(),
                label: SecLabel::of(&theta, &report),
                theta,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimplexGrid {
        resolution,
        dimension,
        points,
    })
}

/// Binary sources `(i/resolution, 1 − i/resolution)` for `0 < i/resolution < 1/2`.
pub fn scan_binary_segment<T: Real>(resolution: u32) -> Result<Vec<GridPoint<T>>> {
    if resolution < 3 {
        return Err(Error::out_of_range("resolution", resolution as f64, "[3, inf)"));
    }
    let m = T::from_u32(resolution).unwrap();
    let last = (resolution - 1) / 2;
    (1..=last)
        .into_par_iter()
        .map(|i| {
            let theta = CategoricalSource::binary(T::from_u32(i).unwrap() / m)?;
            let report = theta.sec_report();
            Ok(GridPoint {
                lattice: vec![i, resolution - i],
                label: SecLabel::of(&theta, &report),
                theta,
                report,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate<T> {
    /// `max_i |ln(1/θ_i) − H(θ)|`
    pub max_info_deviation: T,
    /// Deviation strictly below 2, which implies the SEC for non-uniform sources.
    pub certified: bool,
    /// `e⁻¹/|X| < θ_i < e/|X|` for every `i`.
    pub in_box: bool,
}

/// Sufficient condition for the SEC in terms of the information spread.
pub fn near_uniform_certificate<T: Real>(theta: &CategoricalSource<T>) -> Certificate<T> {
    let h = theta.shannon_entropy();
    let max_info_deviation = theta
        .log_probs()
        .iter()
        .map(|&l| (-l - h).abs())
        .fold(T::zero(), T::max);
    let k = T::from_usize(theta.alphabet_size()).unwrap();
    let e = T::E();
    let (lo, hi) = (T::one() / (e * k), e / k);
    Certificate {
        max_info_deviation,
        certified: max_info_deviation < T::lit(CERTIFICATE_BOUND),
        in_box: theta.probs().iter().all(|&p| p > lo && p < hi),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness<T> {
    pub theta: CategoricalSource<T>,
    pub eps: T,
    pub report: SecReport<T>,
}

/// First `ε` on [`witness_eps_grid`] for which the source
/// `((1−ε)/(k−1), …, (1−ε)/(k−1), ε)` violates the SEC.
pub fn sec_failure_witness<T: Real>(alphabet_size: usize) -> Result<Witness<T>> {
    if alphabet_size < 3 {
        return Err(Error::out_of_range(
            "alphabet size",
            alphabet_size as f64,
            "[3, inf)",
        ));
    }
    for eps in witness_eps_grid() {
        let eps = T::lit(eps);
        if eps >= T::one() / T::from_usize(alphabet_size).unwrap() {
            continue;
        }
        let theta = construction_source(alphabet_size, eps)?;
        let report = theta.sec_report();
        if report.margin <= T::zero() {
            return Ok(Witness { theta, eps, report });
        }
    }
    Err(Error::NotFound(alphabet_size))
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw from `(0, 1]`.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// `count` flat-Dirichlet sources on `|X| = alphabet_size` with every entry
/// at least `min_entry`, drawn by rejection. Deterministic in `seed`.
pub fn random_sources<T: Real>(
    alphabet_size: usize,
    count: usize,
    seed: u64,
    min_entry: f64,
) -> Result<Vec<CategoricalSource<T>>> {
    if alphabet_size < 2 {
        return Err(Error::EmptyOrSingleton(alphabet_size));
    }
    if !(min_entry >= 0.0) || min_entry * alphabet_size as f64 >= 1.0 {
        return Err(Error::out_of_range("min entry", min_entry, "[0, 1/|X|)"));
    }
    let mut rng = seeded(seed, alphabet_size as u64);
    let mut out = Vec::with_capacity(count);
    let mut w = vec![0f64; alphabet_size];
    while out.len() < count {
        w.iter_mut().for_each(|x| *x = -open_unit(&mut rng).ln());
        let total: f64 = w.iter().sum();
        if w.iter().any(|x| x / total < min_entry.max(1e-12)) {
            continue;
        }
        let probs: Vec<T> = w.iter().map(|&x| T::lit(x / total)).collect();
        out.push(CategoricalSource::new(&probs)?);
    }
    Ok(out)
}

/// Sources with log-weights uniform on `[−s, s]`, where the spread `s` is
/// itself uniform on `(0, max_spread)`. Concentrates samples near the
/// uniform source, where the certificate applies.
pub fn random_near_uniform_sources<T: Real>(
    alphabet_size: usize,
    count: usize,
    seed: u64,
    max_spread: f64,
) -> Result<Vec<CategoricalSource<T>>> {
    if alphabet_size < 2 {
        return Err(Error::EmptyOrSingleton(alphabet_size));
    }
    let mut rng = seeded(seed, 1000 + alphabet_size as u64);
    (0..count)
        .map(|_| {
            let s = max_spread * open_unit(&mut rng);
            let w: Vec<T> = (0..alphabet_size)
                .map(|_| T::lit((s * (2.0 * rng.random::<f64>() - 1.0)).exp()))
                .collect();
            CategoricalSource::new(&w)
        })
        .collect()
}

/// Counts from evaluating the SEC and the certificate on a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SampleSummary {
    pub sampled: usize,
    pub sec_failures: usize,
    pub certified: usize,
    /// Certified, non-uniform sources that nevertheless fail the SEC.
    pub certified_failures: usize,
    pub in_box: usize,
    /// Sources inside the box whose deviation is not below 2.
    pub box_without_certificate: usize,
}

pub fn summarize_sample<T: Real>(sources: &[CategoricalSource<T>]) -> SampleSummary {
    let rows: Vec<(bool, Certificate<T>, bool)> = sources
        .par_iter()
        .map(|s| (s.sec_report().satisfies_sec, near_uniform_certificate(s), s.is_uniform()))
        .collect();
    let mut out = SampleSummary {
        sampled: rows.len(),
        sec_failures: 0,
        certified: 0,
        certified_failures: 0,
        in_box: 0,
        box_without_certificate: 0,
    };
    for (sec, cert, uniform) in rows {
        out.sec_failures += usize::from(!sec);
        out.certified += usize::from(cert.certified);
        out.certified_failures += usize::from(cert.certified && !uniform && !sec);
        out.in_box += usize::from(cert.in_box);
        out.box_without_certificate += usize::from(cert.in_box && !cert.certified);
    }
    out
}
