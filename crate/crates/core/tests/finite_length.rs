use guesswork::guessing::{
    build_profile, empirical_exponents, guesswork_moment, log_success_probability, success_probability,
    MomentMode,
};
use guesswork::tilt::rate_function;
use guesswork::Source;

#[test]
fn moment_exponent_approaches_scaled_renyi_entropy() {
    // (1/n) ln E[G^rho] tends to rho * H_{1/(1+rho)}; the gap shrinks like ln(n)/n
    let theta = Source::new(&[0.3, 0.7]).unwrap();
    let rhos = [0.5, 1.0, 2.0];
    let mut previous = [f64::INFINITY; 3];
    for n in [100u64, 500, 2000] {
        let e = empirical_exponents(&theta, n, &rhos, &[]).unwrap();
        for (i, m) in e.moments.iter().enumerate() {
            let target = m.rho * theta.renyi_entropy(1.0 / (1.0 + m.rho)).unwrap();
            let gap = (m.exponent - target).abs();
            assert!(gap * n as f64 <= 2.0 * (n as f64).ln(), "n={n} rho={}: {gap}", m.rho);
            assert!(gap < previous[i]);
            previous[i] = gap;
        }
    }
}

#[test]
fn success_exponent_approaches_rate_function() {
    let theta = Source::new(&[0.3, 0.7]).unwrap();
    let g = [0.3, 0.4, 0.5];
    let e = empirical_exponents(&theta, 2000, &[], &g).unwrap();
    for s in &e.success {
        let rate = rate_function(&theta, s.g).unwrap();
        assert!((s.exponent - rate).abs() <= 0.01, "g={}: {} vs {rate}", s.g, s.exponent);
    }
}

#[test]
fn success_jumps_across_the_entropy() {
    let theta = Source::new(&[0.3, 0.7]).unwrap();
    let h = theta.shannon_entropy();
    let p = build_profile(&theta, 2000).unwrap();
    assert!(success_probability(&p, 2000.0 * (h - 0.05)).unwrap() <= 0.1);
    assert!(success_probability(&p, 2000.0 * (h + 0.05)).unwrap() >= 0.9);
    assert!(log_success_probability(&p, 2000.0 * 2f64.ln()).unwrap() == 0.0);
}

#[test]
fn integral_approximation_is_tight_for_large_classes() {
    // a single class starting at rank 1 is the worst case; 4096 strings keep
    // the midpoint rule within 1e-6 for 0.25 <= rho <= 5
    for (k, n) in [(2usize, 12u64), (2, 16), (4, 6), (3, 9)] {
        let p = build_profile(&Source::uniform(k).unwrap(), n).unwrap();
        assert_eq!(p.classes.len(), 1);
        for rho in [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0] {
            let exact = guesswork_moment(&p, rho, MomentMode::ExactEnumerated).unwrap();
            let approx = guesswork_moment(&p, rho, MomentMode::IntegralApprox).unwrap();
            assert!((approx - exact).exp_m1().abs() <= 1e-6, "k={k} n={n} rho={rho}");
        }
    }
}

#[test]
fn integral_approximation_degrades_for_small_classes() {
    // with classes of eight strings the midpoint rule is only good to ~1e-2
    let p = build_profile(&Source::uniform(2).unwrap(), 3).unwrap();
    let exact = guesswork_moment(&p, 3.0, MomentMode::ExactEnumerated).unwrap();
    let approx = guesswork_moment(&p, 3.0, MomentMode::IntegralApprox).unwrap();
    let rel = (approx - exact).exp_m1().abs();
    assert!(rel > 1e-3 && rel < 1e-2, "{rel}");
    // and it is exact for rho = 1
    let exact = guesswork_moment(&p, 1.0, MomentMode::ExactEnumerated).unwrap();
    let approx = guesswork_moment(&p, 1.0, MomentMode::IntegralApprox).unwrap();
    assert!((approx - exact).abs() < 1e-14);
}

#[test]
fn modes_agree_on_a_skewed_ternary_source() {
    let p = build_profile(&Source::new(&[0.1, 0.2, 0.7]).unwrap(), 14).unwrap();
    for rho in [1.0, 2.0, 3.0] {
        let a = guesswork_moment(&p, rho, MomentMode::ExactEnumerated).unwrap();
        let b = guesswork_moment(&p, rho, MomentMode::ExactInteger).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs(), "rho={rho}");
    }
}
