//! The acceptance suite: every criterion at its stated sample count, with
//! one PASS/FAIL line each.

use hss::flatten::{self, dupapp, lc, lce};
use hss::gfold::check_bracket_gfold_agreement;
use hss::laws::{
    check_bracket_laws, check_functor_laws, check_monad_laws, check_round_trip, check_theta_laws, LawReport,
};
use hss::subst::shipped_morphisms;

const SEED: u64 = 20_241_019;

struct Outcome {
    passed: bool,
    detail: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { passed: true, detail: Vec::new() }
    }

    /// Requires zero failures and at least `min` samples.
    fn clean(&mut self, r: &LawReport, min: usize) {
        let ok = r.passed() && r.samples >= min;
        self.passed &= ok;
        self.detail.push(if ok { r.summary_line() } else { r.to_string() });
    }

    fn require(&mut self, ok: bool, what: String) {
        self.passed &= ok;
        self.detail.push(format!("{} {what}", if ok { "ok:" } else { "NOT:" }));
    }
}

fn monad_laws() -> Outcome {
    let mut o = Outcome::new();
    for sig in [lc(), lce(), dupapp()] {
        o.clean(&check_monad_laws(&sig, 1000, SEED), 1000);
    }
    o
}

fn bracket_laws() -> Outcome {
    let mut o = Outcome::new();
    for sig in [lc(), lce()] {
        for f in shipped_morphisms(&sig) {
            o.clean(&check_bracket_laws(&sig, &f, 1000, SEED), 1000);
        }
    }
    o
}

fn theta_laws() -> Outcome {
    let mut o = Outcome::new();
    let reports = check_theta_laws(&lce(), 500, SEED);
    o.require(reports.len() == 3, format!("{} arities of LCE covered", reports.len()));
    for r in &reports {
        o.clean(r, 500);
    }
    o
}

fn oracle_equivalence() -> Outcome {
    let mut o = Outcome::new();
    for r in flatten::check_oracle_equivalence(1000, SEED) {
        o.clean(&r, 1000);
    }
    o
}

fn initiality_instance() -> Outcome {
    let mut o = Outcome::new();
    let reports = flatten::check_init_compat(1000, SEED);
    o.require(reports.len() == 3, format!("{} shipped f checked", reports.len()));
    for r in &reports {
        o.clean(r, 1000);
    }
    for r in flatten::check_eval_hss_morphism(1000, SEED).reports() {
        o.clean(r, 1000);
    }
    o.clean(&flatten::check_eval_monad_morphism(1000, SEED), 1000);
    o
}

fn fusion_law() -> Outcome {
    let mut o = Outcome::new();
    let reflexive = flatten::fusion_reflexive(&lce(), 500, SEED);
    o.clean(&reflexive.premise, 500);
    o.clean(&reflexive.conclusion, 500);
    for f in shipped_morphisms(&lce()) {
        let r = flatten::fusion_eval(&f, 500, SEED);
        o.clean(&r.premise, 500);
        o.clean(&r.conclusion, 500);
    }
    let broken = flatten::fusion_broken(500, SEED);
    o.require(
        broken.premise.failures > 0,
        format!("broken φ: {} premise failures", broken.premise.failures),
    );
    o
}

fn nonfullness() -> Outcome {
    let mut o = Outcome::new();
    let w = flatten::nonfullness_witness(500, SEED).expect("witness builds");
    o.clean(&w.monad_morphism, 500);
    o.require(w.lhs != w.rhs, format!("τ square fails on {:?}: {:?} vs {:?}", w.counterexample, w.lhs, w.rhs));
    o.require(
        !w.hss_morphism.tau_square.passed(),
        format!("sampled τ square failures: {}", w.hss_morphism.tau_square.failures),
    );
    o
}

fn functor_and_round_trip() -> Outcome {
    let mut o = Outcome::new();
    o.clean(&check_functor_laws(&lce(), 1000, SEED), 1000);
    o.clean(&check_round_trip(&lce(), 1000, SEED), 1000);
    o
}

fn cross_implementation() -> Outcome {
    let mut o = Outcome::new();
    for f in shipped_morphisms(&lce()) {
        o.clean(&check_bracket_gfold_agreement(&lce(), &f, 1000, SEED), 1000);
    }
    o.clean(&flatten::check_eval_agreement(1000, SEED), 1000);
    o
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    println!();
    let criteria: [Criterion; 9] = [
        ("1 monad laws (LC, LCE, DUPAPP)", monad_laws),
        ("2 bracket laws (identity, eta, const-closed)", bracket_laws),
        ("3 strength laws per LCE arity", theta_laws),
        ("4 oracle equivalence (EVAL, subst)", oracle_equivalence),
        ("5 initiality instance and EVAL morphisms", initiality_instance),
        ("6 fusion law", fusion_law),
        ("7 non-fullness witness", nonfullness),
        ("8 functor laws and parser round-trip", functor_and_round_trip),
        ("9 cross-implementation agreement", cross_implementation),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let outcome = run();
        println!("[{}] criterion {name}", if outcome.passed { "PASS" } else { "FAIL" });
        for line in &outcome.detail {
            println!("    {line}");
        }
        if !outcome.passed {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
