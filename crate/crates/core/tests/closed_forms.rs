use guesswork::source::{binary_closed_forms, construction_closed_forms, construction_source};
use guesswork::Source;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn binary_closed_forms_agree_with_direct_sums() {
    for i in 1..500 {
        let phi = i as f64 / 1000.0;
        let s = Source::binary(phi).unwrap();
        let c = binary_closed_forms(phi).unwrap();
        assert!(close(s.shannon_entropy(), c.entropy, 1e-12), "H at {phi}");
        assert!(close(s.varentropy(), c.varentropy, 1e-10), "V at {phi}");
        assert!((s.skewentropy() - c.skewentropy).abs() <= 1e-10 * c.skewentropy.abs().max(1e-6), "S at {phi}");
    }
}

#[test]
fn construction_closed_forms_agree_with_direct_sums() {
    for k in 3..=12 {
        for e in 2..=8 {
            let eps = 10f64.powi(-e);
            let s = construction_source(k, eps).unwrap();
            let c = construction_closed_forms(k, eps).unwrap();
            assert!(close(s.shannon_entropy(), c.entropy, 1e-11), "H k={k} eps={eps}");
            assert!(close(s.varentropy(), c.varentropy, 1e-8), "V k={k} eps={eps}");
            assert!(close(s.skewentropy(), c.skewentropy, 1e-8), "S k={k} eps={eps}");
        }
    }
}

#[test]
fn sec_margin_matches_closed_forms() {
    // margins from a 40-digit evaluation
    let cases = [
        (3, 1e-2, -0.18133335012900517),
        (3, 1e-5, -0.007156397403237046),
        (8, 1e-3, -0.14100292055401972),
        (16, 1e-2, 0.01578114214414316),
    ];
    for (k, eps, margin) in cases {
        let r = construction_source(k, eps).unwrap().sec_report();
        assert!(close(r.margin, margin, 1e-9), "k={k} eps={eps}: {}", r.margin);
    }
}
