//! Seeded, parallel property checks and their reports.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ctx::{Ctx, Leaf, LeafMap};
use crate::error::Result;
use crate::gen::{random_renaming, rng_for, sample_base_ctx, Generator};
use crate::pointed::{dist_map, PointedEndo, PointedMorphism};
use crate::signature::{theta_binding, theta_flat, Arity, Signature};
use crate::subst::{bracket, bracket_square_rhs, mu, shipped_transforms};
use crate::syntax;
use crate::term::{map_leaves, map_leaves_raw, validate, Term};

const MAX_COUNTEREXAMPLES: usize = 10;

/// A failing sample. `term` is the sampled input (when one was built) and
/// `ctx` the context it lives over.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub sample: usize,
    pub size: usize,
    pub term: Option<Term>,
    pub ctx: Ctx,
    pub sig: Signature,
    pub note: String,
}

impl Counterexample {
    pub fn new(term: &Term, ctx: &Ctx, sig: &Signature, note: impl Into<String>) -> Self {
        Counterexample {
            sample: 0,
            size: term.size(),
            term: Some(term.clone()),
            ctx: ctx.clone(),
            sig: sig.clone(),
            note: note.into(),
        }
    }

    fn from_error(err: &crate::error::Error) -> Self {
        Counterexample {
            sample: 0,
            size: 0,
            term: None,
            ctx: Ctx::Fin(0),
            sig: Signature::empty(),
            note: format!("error: {err}"),
        }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.term {
            None => write!(f, "  sample {}: {}", self.sample, self.note),
            Some(t) => {
                let shown = syntax::print_term_in(t, &self.sig, &self.ctx).unwrap_or_else(|_| format!("{t:?}"));
                write!(f, "  sample {} over {}: {}  -- {}", self.sample, self.ctx, shown, self.note)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LawReport {
    pub suite: String,
    pub samples: usize,
    pub failures: usize,
    pub seed: u64,
    /// At most ten, smallest first (ties broken by sample index).
    pub counterexamples: Vec<Counterexample>,
}

impl LawReport {
    pub fn empty(suite: &str, seed: u64) -> Self {
        LawReport { suite: suite.to_string(), samples: 0, failures: 0, seed, counterexamples: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn summary_line(&self) -> String {
        format!("suite={} samples={} failures={} seed={}", self.suite, self.samples, self.failures, self.seed)
    }

    /// Combines two shards of the same suite.
    pub fn merge(mut self, other: LawReport) -> LawReport {
        self.samples += other.samples;
        self.failures += other.failures;
        self.counterexamples.extend(other.counterexamples);
        self.counterexamples.sort_by_key(|c| (c.size, c.sample));
        self.counterexamples.truncate(MAX_COUNTEREXAMPLES);
        self
    }

    fn single(suite: &str, seed: u64, sample: usize, outcome: Result<Option<Counterexample>>) -> Self {
        let failure = match outcome {
            Ok(None) => None,
            Ok(Some(c)) => Some(c),
            Err(e) => Some(Counterexample::from_error(&e)),
        };
        let mut r = LawReport::empty(suite, seed);
        r.samples = 1;
        if let Some(mut c) = failure {
            c.sample = sample;
            r.failures = 1;
            r.counterexamples.push(c);
        }
        r
    }

    /// Runs `check` once per sample, each with its own RNG stream derived
    /// from `(seed, sample index)`. An `Err` counts as a failure.
    pub fn run<F>(suite: &str, samples: usize, seed: u64, check: F) -> LawReport
    where
        F: Fn(usize, &mut ChaCha8Rng) -> Result<Option<Counterexample>> + Sync,
    {
        (0..samples)
            .into_par_iter()
            .map(|i| LawReport::single(suite, seed, i, check(i, &mut rng_for(seed, i as u64))))
            .reduce(|| LawReport::empty(suite, seed), LawReport::merge)
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary_line())?;
        for c in &self.counterexamples {
            write!(f, "\n{c}")?;
        }
        Ok(())
    }
}

fn budget(rng: &mut ChaCha8Rng, max: usize) -> usize {
    rng.gen_range(0..=max)
}

fn differ(lhs: &Term, rhs: &Term, input: &Term, ctx: &Ctx, sig: &Signature, note: &str) -> Option<Counterexample> {
    (lhs != rhs).then(|| Counterexample::new(input, ctx, sig, note))
}

/// The bracket triangle and square for `f`, pointedness of `f`, and
/// naturality of `{f}` in the context and in `f`.
pub fn check_bracket_laws(sig: &Signature, f: &PointedMorphism, samples: usize, seed: u64) -> LawReport {
    let gen = Generator::new(sig);
    let z = f.z().clone();
    let transforms = shipped_transforms(&z);
    LawReport::run(&format!("bracket-laws[{}]", f.name()), samples, seed, |i, rng| {
        let c = sample_base_ctx(rng);
        let zc = z.on_ctx(&c);
        let b = budget(rng, 25);

        // triangle: {f} ∘ (η·Z) = f
        if let Ok(l) = gen.leaf(rng, &zc, b.min(10)) {
            let v = Term::Var(l.clone());
            if let Some(ce) = differ(&bracket(sig, f, &v, &c)?, &f.component(&c, &l)?, &v, &zc, sig, "triangle") {
                return Ok(Some(ce));
            }
        }
        // pointedness: f ∘ e = η
        if let Ok(l) = gen.leaf(rng, &c, b.min(10)) {
            let v = Term::Var(l.clone());
            let through = f.component(&c, &z.point(&c).apply(&l)?)?;
            if let Some(ce) = differ(&through, &v, &v, &c, sig, "pointedness f ∘ e = η") {
                return Ok(Some(ce));
            }
        }
        // square: {f} ∘ (τ·Z) = τ ∘ H{f} ∘ θ
        let node = gen.node(rng, &zc, b)?;
        if let Term::Node(op, args) = &node {
            let rhs = bracket_square_rhs(sig, f, *op, args, &c)?;
            if let Some(ce) = differ(&bracket(sig, f, &node, &c)?, &rhs, &node, &zc, sig, "square") {
                return Ok(Some(ce));
            }
        }
        // naturality in the context, along a renaming Fin(n) -> Fin(m)
        let n = rng.gen_range(0..=3);
        let m = if n == 0 { rng.gen_range(0..=3) } else { rng.gen_range(1..=3) };
        let g = random_renaming(rng, n, m);
        let zn = z.on_ctx(&Ctx::Fin(n));
        if let Ok(t) = gen.term(rng, &zn, b) {
            let lhs = map_leaves(sig, &g, &bracket(sig, f, &t, &Ctx::Fin(n))?)?;
            let moved = map_leaves_raw(sig, &|l: &Leaf| z.on_map(&g).apply(l), &t)?;
            let rhs = bracket(sig, f, &moved, &Ctx::Fin(m))?;
            if let Some(ce) = differ(&lhs, &rhs, &t, &zn, sig, "naturality in the context") {
                return Ok(Some(ce));
            }
        }
        // naturality in f: {f ∘ g} = {f} ∘ T(g)
        let g = &transforms[i % transforms.len()];
        let src = g.source().on_ctx(&c);
        let t = gen.term(rng, &src, b)?;
        let lhs = bracket(sig, &f.precompose(g), &t, &c)?;
        let gc = g.at(&c);
        let rhs = bracket(sig, f, &map_leaves_raw(sig, &|l: &Leaf| gc.apply(l), &t)?, &c)?;
        Ok(differ(&lhs, &rhs, &t, &src, sig, &format!("naturality in f along {}", g.name())))
    })
}

/// Left unit, right unit and associativity of `(T, η, μ)`.
pub fn check_monad_laws(sig: &Signature, samples: usize, seed: u64) -> LawReport {
    let gen = Generator::new(sig);
    LawReport::run("monad-laws", samples, seed, |_, rng| {
        let c = sample_base_ctx(rng);
        let b = budget(rng, 25);
        let t = gen.term(rng, &c, b)?;
        let left = mu(sig, &Term::Var(Leaf::boxed(t.clone())), &c)?;
        if let Some(ce) = differ(&left, &t, &t, &c, sig, "left unit") {
            return Ok(Some(ce));
        }
        let wrapped = map_leaves(sig, &crate::pointed::eta_wrap_map(&c), &t)?;
        if let Some(ce) = differ(&mu(sig, &wrapped, &c)?, &t, &t, &c, sig, "right unit") {
            return Ok(Some(ce));
        }
        let cc = c.tm_over().tm_over();
        let b = budget(rng, 10);
        let tt = gen.term(rng, &cc, b)?;
        let lhs = mu(sig, &mu(sig, &tt, &c.tm_over())?, &c)?;
        let inner = crate::gfold::map_boxed(sig, &tt, |w| mu(sig, w, &c))?;
        let rhs = mu(sig, &inner, &c)?;
        Ok(differ(&lhs, &rhs, &tt, &cc, sig, "associativity"))
    })
}

/// Identity and composition laws of the strength, one report per arity of
/// `sig`. Pairs `(Z', Z)` are drawn from `{Ext, Tm}`.
pub fn check_theta_laws(sig: &Signature, samples: usize, seed: u64) -> Vec<LawReport> {
    let gen = Generator::new(sig);
    let choices = [PointedEndo::Ext, PointedEndo::Tm(sig.clone())];
    sig.arities()
        .iter()
        .map(|arity| {
            LawReport::run(&format!("theta-laws[{arity}]"), samples, seed, |_, rng| {
                let c = sample_base_ctx(rng);
                let z2 = choices[rng.gen_range(0..2)].clone();
                let z1 = choices[rng.gen_range(0..2)].clone();
                let both = PointedEndo::compose(z2.clone(), z1.clone());
                match arity {
                    Arity::Binding(ks) => {
                        // identity law
                        let args = ks
                            .iter()
                            .map(|&k| gen.term_upto(rng, &c.ext_n(k), 12))
                            .collect::<Result<Vec<_>>>()?;
                        let same = theta_binding(sig, ks, &PointedEndo::Id, &args, &c)?;
                        if same != args {
                            let shown = args.first().cloned().unwrap_or(Term::idx(0));
                            return Ok(Some(Counterexample::new(&shown, &c, sig, "identity law")));
                        }
                        // composition law, argument by argument
                        let z1c = z1.on_ctx(&c);
                        for &k in ks {
                            let src = both.on_ctx(&c).ext_n(k);
                            let a = gen.term_upto(rng, &src, 12)?;
                            let lhs = apply_map(sig, &dist_map(&both, &c, k), &a)?;
                            let first = apply_map(sig, &dist_map(&z2, &z1c, k), &a)?;
                            let rhs = apply_map(sig, &z2.on_map(&dist_map(&z1, &c, k)), &first)?;
                            if lhs != rhs {
                                return Ok(Some(Counterexample::new(&a, &src, sig, format!("composition law at {both}"))));
                            }
                        }
                        Ok(None)
                    }
                    Arity::Flattening => {
                        let u = gen.term_upto(rng, &c.tm_over(), 12)?;
                        if theta_flat(sig, &PointedEndo::Id, &u, &c)? != u {
                            return Ok(Some(Counterexample::new(&u, &c.tm_over(), sig, "identity law")));
                        }
                        let d = both.on_ctx(&c).tm_over();
                        let u = gen.term_upto(rng, &d, 12)?;
                        let lhs = theta_flat(sig, &both, &u, &c)?;
                        let first = apply_map(sig, &z2.point(&d), &u)?;
                        let rhs = apply_map(sig, &z2.on_map(&z1.point(&d)), &first)?;
                        Ok(differ(&lhs, &rhs, &u, &d, sig, &format!("composition law at {both}")))
                    }
                }
            })
        })
        .collect()
}

fn apply_map(sig: &Signature, g: &LeafMap, t: &Term) -> Result<Term> {
    map_leaves_raw(sig, &|l: &Leaf| g.apply(l), t)
}

/// Functor laws of `map_leaves` along renamings and weakenings, and
/// preservation of validity.
pub fn check_functor_laws(sig: &Signature, samples: usize, seed: u64) -> LawReport {
    let gen = Generator::new(sig);
    LawReport::run("functor-laws", samples, seed, |_, rng| {
        let c = sample_base_ctx(rng);
        let t = gen.term_upto(rng, &c, 25)?;
        let id = map_leaves(sig, &LeafMap::identity(&c), &t)?;
        if let Some(ce) = differ(&id, &t, &t, &c, sig, "identity") {
            return Ok(Some(ce));
        }
        let n = rng.gen_range(0..=3);
        let m = if n == 0 { rng.gen_range(0..=3) } else { rng.gen_range(1..=3) };
        let p = if m == 0 { rng.gen_range(0..=3) } else { rng.gen_range(1..=3) };
        let h = random_renaming(rng, n, m);
        let g = random_renaming(rng, m, p).lift_ext().after(&crate::ctx::weaken_map(&Ctx::Fin(m)))?;
        let g = if rng.gen_bool(0.5) { g } else { random_renaming(rng, m, p) };
        let src = Ctx::Fin(n);
        let t = gen.term_upto(rng, &src, 25)?;
        let gh = g.after(&h)?;
        let lhs = map_leaves(sig, &gh, &t)?;
        let rhs = map_leaves(sig, &g, &map_leaves(sig, &h, &t)?)?;
        if let Some(ce) = differ(&lhs, &rhs, &t, &src, sig, "composition") {
            return Ok(Some(ce));
        }
        if !validate(sig, gh.target(), &lhs) {
            return Ok(Some(Counterexample::new(&t, &src, sig, "validity not preserved")));
        }
        Ok(None)
    })
}

/// Pointedness `f ∘ e = η` and naturality of the components of `f` along
/// renamings.
pub fn check_pointed_morphism(sig: &Signature, f: &PointedMorphism, samples: usize, seed: u64) -> LawReport {
    let gen = Generator::new(sig);
    let z = f.z().clone();
    LawReport::run(&format!("pointed-morphism[{}]", f.name()), samples, seed, |_, rng| {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=3);
        let c = Ctx::Fin(n);
        let l = gen.leaf(rng, &c, 0)?;
        let v = Term::Var(l.clone());
        if f.component(&c, &z.point(&c).apply(&l)?)? != v {
            return Ok(Some(Counterexample::new(&v, &c, sig, "pointedness")));
        }
        let g = random_renaming(rng, n, m);
        let zc = z.on_ctx(&c);
        let b = budget(rng, 10);
        let l = gen.leaf(rng, &zc, b)?;
        let lhs = f.component(&Ctx::Fin(m), &z.on_map(&g).apply(&l)?)?;
        let rhs = map_leaves(sig, &g, &f.component(&c, &l)?)?;
        Ok(differ(&lhs, &rhs, &Term::Var(l), &zc, sig, "naturality"))
    })
}

/// `parse ∘ print = id` on sampled terms over `Fin(0..=3)`, and
/// `print ∘ parse = id` on the printed text.
pub fn check_round_trip(sig: &Signature, samples: usize, seed: u64) -> LawReport {
    let gen = Generator::new(sig);
    LawReport::run("round-trip", samples, seed, |_, rng| {
        let n = rng.gen_range(0..=3);
        let c = Ctx::Fin(n);
        let t = gen.term_upto(rng, &c, 25)?;
        let text = syntax::print_term(&t, sig)?;
        let back = syntax::parse_term(&text, sig, n)?;
        if back != t {
            return Ok(Some(Counterexample::new(&t, &c, sig, "parse ∘ print ≠ id")));
        }
        let again = syntax::print_term(&back, sig)?;
        Ok((again != text).then(|| Counterexample::new(&t, &c, sig, "print ∘ parse ≠ id on printed text")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten::{self, lam};

    fn fake(sample: usize, size: usize) -> Counterexample {
        Counterexample {
            sample,
            size,
            term: None,
            ctx: Ctx::Fin(0),
            sig: Signature::empty(),
            note: String::new(),
        }
    }

    fn report(samples: usize, ces: Vec<Counterexample>) -> LawReport {
        LawReport { suite: "s".into(), samples, failures: ces.len(), seed: 1, counterexamples: ces }
    }

    #[test]
    fn summary_format() {
        let r = report(1000, vec![]);
        assert_eq!(r.to_string(), "suite=s samples=1000 failures=0 seed=1");
    }

    #[test]
    fn merge_is_associative_and_keeps_smallest() {
        let a = report(5, (0..6).map(|i| fake(i, 10 - i)).collect());
        let b = report(5, (6..12).map(|i| fake(i, 3)).collect());
        let c = report(2, vec![fake(20, 1)]);
        let left = a.clone().merge(b.clone()).merge(c.clone());
        let right = a.merge(b.merge(c));
        assert_eq!(left, right);
        assert_eq!(left.samples, 12);
        assert_eq!(left.failures, 13);
        assert_eq!(left.counterexamples.len(), 10);
        assert_eq!(left.counterexamples[0].sample, 20);
        assert_eq!(left.counterexamples[1].sample, 6);
    }

    #[test]
    fn run_is_deterministic() {
        let lc = flatten::lc();
        let a = check_monad_laws(&lc, 50, 9);
        let b = check_monad_laws(&lc, 50, 9);
        assert_eq!(a, b);
        assert!(a.passed());
    }

    #[test]
    fn small_suites_pass() {
        let lce = flatten::lce();
        for f in crate::subst::shipped_morphisms(&lce) {
            assert!(check_bracket_laws(&lce, &f, 60, 3).passed());
            assert!(check_pointed_morphism(&lce, &f, 60, 3).passed());
        }
        for r in check_theta_laws(&lce, 60, 3) {
            assert!(r.passed(), "{r}");
        }
        assert!(check_functor_laws(&lce, 60, 3).passed());
    }

    #[test]
    fn corrupted_identity_fails() {
        let lc = flatten::lc();
        let bad = PointedMorphism::new("corrupted", PointedEndo::Tm(lc.clone()), |_, l| match l {
            Leaf::Boxed(t) if t.is_var() => Ok(lam(Term::Var(Leaf::New))),
            Leaf::Boxed(t) => Ok((**t).clone()),
            _ => unreachable!(),
        });
        let r = check_bracket_laws(&lc, &bad, 40, 0);
        assert!(r.failures > 0);
        assert!(!r.counterexamples.is_empty());
    }
}
