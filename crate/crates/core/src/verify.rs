//! Self-checks bundled with the library: finite-difference identities, the
//! budgeted ordering sweeps and SEC landscape facts, and engine-vs-oracle
//! equivalence. Failures are reported as data, never as errors.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{
    moment_sweep, rate_sweep, search_moment_violations, search_rate_violations, uniform_moment_sweep,
    uniform_rate_sweep, default_alpha_grid, default_g_fractions, default_rho_grid, SweepSummary,
};
use crate::error::Result;
use crate::guessing::{
    brute_force_oracle, build_profile, guesswork_moment, success_probability, MomentMode, TieOrder,
};
use crate::secscan::{
    near_uniform_certificate, random_near_uniform_sources, random_sources, scan_binary_segment,
    sec_failure_witness, summarize_sample, SecLabel, DEFAULT_SEED,
};
use crate::source::CategoricalSource;
use crate::tilt::{derivative_checks, kl_divergence, rate_function, tilt, DEFAULT_FD_STEP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Derivatives,
    Theorems,
    Oracle,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Derivatives => "derivatives",
            Suite::Theorems => "theorems",
            Suite::Oracle => "oracle",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRecord {
    pub suite: String,
    pub case: String,
    pub status: Status,
    pub residual: Option<f64>,
}

impl VerifyRecord {
    fn new(suite: Suite, case: impl Into<String>, passed: bool, residual: Option<f64>) -> Self {
        Self {
            suite: suite.name().to_string(),
            case: case.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            residual,
        }
    }

    fn from_result(suite: Suite, case: impl Into<String>, r: Result<(bool, Option<f64>)>) -> Self {
        match r {
            Ok((passed, residual)) => Self::new(suite, case, passed, residual),
            Err(_) => Self::new(suite, case, false, None),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Runs one suite, or every suite for [`Suite::All`], in a fixed order.
pub fn run_suite(suite: Suite) -> Vec<VerifyRecord> {
    match suite {
        Suite::Derivatives => derivative_suite(),
        Suite::Theorems => theorem_suite(),
        Suite::Oracle => oracle_suite(),
        Suite::All => {
            let mut out = derivative_suite();
            out.extend(theorem_suite());
            out.extend(oracle_suite());
            out
        }
    }
}

/// Twenty seeded sources with `|X| ∈ {2, …, 5}` and every entry at least 0.01.
pub fn derivative_sources() -> Vec<CategoricalSource<f64>> {
    (2..=5)
        .flat_map(|k| random_sources(k, 5, DEFAULT_SEED, 0.01).expect("valid sampling parameters"))
        .collect()
}

fn derivative_suite() -> Vec<VerifyRecord> {
    let suite = Suite::Derivatives;
    derivative_sources()
        .iter()
        .enumerate()
        .flat_map(|(i, s)| {
            let label = format!("source{:02}_k{}", i, s.alphabet_size());
            match derivative_checks(s, DEFAULT_FD_STEP) {
                Ok(report) => report
                    .checks
                    .iter()
                    .map(|c| {
                        VerifyRecord::new(
                            suite,
                            format!("{label}/{}", c.name),
                            c.passed,
                            Some(c.residual),
                        )
                    })
                    .collect(),
                Err(_) => vec![VerifyRecord::new(suite, label, false, None)],
            }
        })
        .collect()
}

/// Fifty seeded binary sources with both entries at least 0.01.
pub fn theorem_binary_sources() -> Vec<CategoricalSource<f64>> {
    random_sources(2, 50, DEFAULT_SEED, 0.01).expect("valid sampling parameters")
}

/// A hundred seeded sources, 25 per `|X| ∈ {2, 3, 4, 5}`.
pub fn corollary_sources() -> Vec<CategoricalSource<f64>> {
    (2..=5)
        .flat_map(|k| random_sources(k, 25, DEFAULT_SEED + 1, 0.0).expect("valid sampling parameters"))
        .collect()
}

pub const SWEEP_ALPHAS: [f64; 4] = [1.1, 1.5, 2.0, 4.0];
pub const SWEEP_RHOS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];
pub const SWEEP_G_FRACTIONS: [f64; 3] = [0.2, 0.5, 0.8];
/// Certified samples per alphabet size in the soundness check.
pub const CERTIFIED_SAMPLES: usize = 10_000;

fn sweep_record(suite: Suite, case: &str, r: Result<SweepSummary<f64>>) -> VerifyRecord {
    VerifyRecord::from_result(
        suite,
        case,
        r.map(|s| (s.violations == 0 && s.evaluated > 0, Some(s.min_margin))),
    )
}

/// `count` certified near-uniform sources on `|X| = k`.
pub fn certified_sources(k: usize, count: usize) -> Vec<CategoricalSource<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut batch = 0;
    while out.len() < count {
        let sources = random_near_uniform_sources(k, count, DEFAULT_SEED + batch, 2.5)
            .expect("valid sampling parameters");
        out.extend(
            sources
                .into_iter()
                .filter(|s| near_uniform_certificate(s).certified && !s.is_uniform()),
        );
        batch += 1;
    }
    out.truncate(count);
    out
}

fn theorem_suite() -> Vec<VerifyRecord> {
    let suite = Suite::Theorems;
    let binary = theorem_binary_sources();
    let mixed = corollary_sources();
    let mut out = vec![
        sweep_record(
            suite,
            "tilt_moment_sweep",
            moment_sweep(&binary, &SWEEP_ALPHAS, &SWEEP_RHOS),
        ),
        sweep_record(
            suite,
            "uniform_moment_sweep",
            uniform_moment_sweep(&mixed, &SWEEP_RHOS),
        ),
        sweep_record(
            suite,
            "tilt_rate_sweep",
            rate_sweep(&binary, &SWEEP_ALPHAS, &SWEEP_G_FRACTIONS),
        ),
        sweep_record(
            suite,
            "uniform_rate_sweep",
            uniform_rate_sweep(&mixed, &SWEEP_G_FRACTIONS),
        ),
    ];

    // closed-form uniform rate against the divergence it abbreviates
    let uniform_rate = (|| -> Result<(bool, Option<f64>)> {
        let mut worst = 0f64;
        for k in 2..=5usize {
            let u = CategoricalSource::<f64>::uniform(k)?;
            let probe = &mixed[(k - 2) * 25];
            for a in [0.5, 1.5, 3.0] {
                let p = tilt(probe, a)?;
                let closed = rate_function(&u, p.entropy)?;
                worst = worst.max((closed - kl_divergence(&p.dist, &u)?).abs());
            }
        }
        Ok((worst <= 1e-12, Some(worst)))
    })();
    out.push(VerifyRecord::from_result(suite, "uniform_rate_closed_form", uniform_rate));

    let binary_scan = scan_binary_segment::<f64>(1000).map(|pts| {
        let fails = pts.iter().filter(|p| p.label != SecLabel::Pass).count();
        (fails == 0, Some(fails as f64))
    });
    out.push(VerifyRecord::from_result(suite, "binary_sec_totality", binary_scan));

    for k in 3..=16 {
        let w = sec_failure_witness::<f64>(k).map(|w| {
            let margin = w.theta.sec_report().margin;
            (margin <= 0.0, Some(margin))
        });
        out.push(VerifyRecord::from_result(suite, format!("sec_witness_k{k}"), w));
    }

    let soundness: Vec<VerifyRecord> = (2..=8usize)
        .into_par_iter()
        .map(|k| {
            let summary = summarize_sample(&certified_sources(k, CERTIFIED_SAMPLES));
            let ok = summary.certified_failures == 0
                && summary.box_without_certificate == 0
                && summary.certified == CERTIFIED_SAMPLES;
            VerifyRecord::new(
                suite,
                format!("certificate_soundness_k{k}"),
                ok,
                Some(summary.certified_failures as f64),
            )
        })
        .collect();
    out.extend(soundness);

    match sec_failure_witness::<f64>(3) {
        Ok(w) => {
            let m = search_moment_violations(&w.theta, &default_alpha_grid(), &default_rho_grid());
            out.push(VerifyRecord::from_result(
                suite,
                "moment_violation_found",
                m.map(|s| (s.found(), Some(s.min_margin))),
            ));
            let r = search_rate_violations(&w.theta, &default_alpha_grid(), &default_g_fractions());
            out.push(VerifyRecord::from_result(
                suite,
                "rate_violation_found",
                r.map(|s| (s.found(), Some(s.min_margin))),
            ));
        }
        Err(_) => {
            out.push(VerifyRecord::new(suite, "moment_violation_found", false, None));
            out.push(VerifyRecord::new(suite, "rate_violation_found", false, None));
        }
    }
    out
}

/// Ten sources per alphabet size spread over a small simplex lattice.
/// Binary sources run from 0.05 to 0.5 and include the uniform one.
pub fn oracle_grid(k: usize) -> Vec<CategoricalSource<f64>> {
    if k == 2 {
        return (1..=10)
            .map(|i| CategoricalSource::binary(i as f64 / 20.0).unwrap())
            .collect();
    }
    // smallest lattice with at least ten interior points
    let mut r = k as u32;
    let lattice = loop {
        let mut pts = Vec::new();
        lattice_points(r, k, &mut vec![], &mut pts);
        if pts.len() >= 10 {
            break pts;
        }
        r += 1;
    };
    (0..10)
        .map(|i| {
            let l = &lattice[i * lattice.len() / 10];
            let w: Vec<f64> = l.iter().map(|&x| x as f64 / r as f64).collect();
            CategoricalSource::new(&w).unwrap()
        })
        .collect()
}

fn lattice_points(remaining: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slots == 1 {
        if remaining >= 1 {
            let mut p = prefix.clone();
            p.push(remaining);
            out.push(p);
        }
        return;
    }
    for x in 1..remaining {
        prefix.push(x);
        lattice_points(remaining - x, slots - 1, prefix, out);
        prefix.pop();
    }
}

pub const ORACLE_RHOS: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
pub const ORACLE_BUDGET_POINTS: usize = 20;

/// Query counts `round((|X|^n)^{j/19})`, `j = 0, …, 19`.
pub fn oracle_budgets(k: usize, n: u32) -> Vec<u64> {
    let log_total = n as f64 * (k as f64).ln();
    (0..ORACLE_BUDGET_POINTS)
        .map(|j| {
            let f = j as f64 / (ORACLE_BUDGET_POINTS - 1) as f64;
            (f * log_total).exp().round().max(1.0) as u64
        })
        .collect()
}

fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

/// Largest relative difference between the type-class engine and brute
/// force, plus the largest difference between the two tie orders.
pub fn oracle_case(theta: &CategoricalSource<f64>, n: u32) -> Result<(f64, f64)> {
    let k = theta.alphabet_size();
    let budgets = oracle_budgets(k, n);
    let lex = brute_force_oracle(theta, n, &ORACLE_RHOS, &budgets, TieOrder::Lexicographic)?;
    let rev = brute_force_oracle(theta, n, &ORACLE_RHOS, &budgets, TieOrder::ReverseLexicographic)?;
    let profile = build_profile(theta, n as u64)?;
    let mut worst = 0f64;
    for (&rho, &expected) in ORACLE_RHOS.iter().zip(&lex.moments) {
        let got = guesswork_moment(&profile, rho, MomentMode::ExactEnumerated)?.exp();
        worst = worst.max(relative_error(got, expected));
    }
    for (&b, &expected) in budgets.iter().zip(&lex.success) {
        let got = success_probability(&profile, (b as f64).ln())?;
        worst = worst.max(relative_error(got, expected));
    }
    let tie = lex
        .moments
        .iter()
        .chain(&lex.success)
        .zip(rev.moments.iter().chain(&rev.success))
        .map(|(&a, &b)| relative_error(a, b))
        .fold(0f64, f64::max);
    Ok((worst, tie))
}

/// Every `(|X|, n, θ)` with `|X| ∈ {2, 3, 4}`, `n ≤ 8`, `|X|^n ≤ 2^16`.
pub fn oracle_instances() -> Vec<(usize, u32, usize, CategoricalSource<f64>)> {
    let mut out = Vec::new();
    for k in 2..=4usize {
        let grid = oracle_grid(k);
        for n in 1..=8u32 {
            if (k as u64).pow(n) > 1 << 16 {
                continue;
            }
            for (i, theta) in grid.iter().enumerate() {
                out.push((k, n, i, theta.clone()));
            }
        }
    }
    out
}

fn oracle_suite() -> Vec<VerifyRecord> {
    let suite = Suite::Oracle;
    oracle_instances()
        .par_iter()
        .flat_map_iter(|(k, n, i, theta)| {
            let case = format!("k{k}_n{n}_source{i}");
            match oracle_case(theta, *n) {
                Ok((engine, tie)) => vec![
                    VerifyRecord::new(suite, format!("{case}/engine"), engine <= 1e-12, Some(engine)),
                    VerifyRecord::new(suite, format!("{case}/tie_order"), tie == 0.0, Some(tie)),
                ],
                Err(_) => vec![VerifyRecord::new(suite, case, false, None)],
            }
        })
        .collect()
}
