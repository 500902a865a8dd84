use guesswork::verify::{run_suite, Status, Suite};

fn failures(suite: Suite) -> Vec<String> {
    run_suite(suite)
        .into_iter()
        .filter(|r| r.status == Status::Fail)
        .map(|r| format!("{} {:?}", r.case, r.residual))
        .collect()
}

#[test]
fn theorem_suite_passes() {
    let f = failures(Suite::Theorems);
    assert!(f.is_empty(), "{f:#?}");
}

#[test]
fn oracle_suite_passes() {
    let f = failures(Suite::Oracle);
    assert!(f.is_empty(), "{f:#?}");
}

#[test]
fn suites_are_reproducible() {
    assert_eq!(run_suite(Suite::Derivatives), run_suite(Suite::Derivatives));
}
