use std::process::Command;

fn hss(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hss")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn eval_resolves_flattening() {
    assert_eq!(hss(&["eval", "--sig", "lce", "--scope", "0", "flat{ 0 | \\.0 }"]), (0, "\\.0\n".into()));
    assert_eq!(
        hss(&["eval", "--sig", "lce", "--scope", "1", "flat{ (0 1) | \\.0, 0 }"]),
        (0, "((\\.0) 0)\n".into())
    );
}

#[test]
fn monad_suite_summary_line() {
    let (code, out) = hss(&["check", "--suite", "monad-laws", "--sig", "lce", "--samples", "1000", "--seed", "42"]);
    assert_eq!(code, 0);
    assert_eq!(out, "suite=monad-laws samples=1000 failures=0 seed=42\n");
}

#[test]
fn exit_codes() {
    assert_eq!(hss(&["eval", "--sig", "lce", "--scope", "0", "(0 1)"]).0, 3);
    assert_eq!(hss(&["validate", "--scope", "1", "(0 ("]).0, 2);
    assert_eq!(hss(&["check", "--suite", "no-such-suite"]).0, 4);
    assert_eq!(hss(&["validate", "--scope", "2", "lam.(0 1 2)"]), (0, "valid\n".into()));
}

#[test]
fn nonfullness_exits_zero_on_the_expected_pattern() {
    let (code, out) = hss(&["check", "--suite", "nonfullness", "--samples", "200", "--format", "summary"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("suite=monad-morphism[swap] samples=200 failures=0"));
    assert!(out.contains("tau-square"));
}

#[test]
fn every_suite_runs_clean() {
    for suite in [
        "bracket-laws",
        "monad-laws",
        "hss-morphism-eval",
        "monad-morphism-eval",
        "init-compat",
        "fusion",
        "oracle-equivalence",
        "theta-laws",
    ] {
        let (code, out) = hss(&["check", "--suite", suite, "--samples", "100", "--seed", "3"]);
        assert_eq!(code, 0, "{suite}: {out}");
        assert!(out.lines().all(|l| l.starts_with("suite=") && l.ends_with("failures=0 seed=3") || !l.starts_with("suite=")) , "{out}");
    }
}

#[test]
fn subst_and_random() {
    assert_eq!(
        hss(&["subst", "--sig", "lc", "--scope", "1", "--map", "0=\\.0", "\\.(1 0)"]),
        (0, "\\.((\\.0) 0)\n".into())
    );
    let a = hss(&["random", "--sig", "lce", "--scope", "2", "--budget", "12", "--seed", "5"]);
    let b = hss(&["random", "--sig", "lce", "--scope", "2", "--budget", "12", "--seed", "5"]);
    assert_eq!(a, b);
    assert_eq!(hss(&["validate", "--sig", "lce", "--scope", "2", a.1.trim()]).0, 0);
}
