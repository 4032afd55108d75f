//! The untyped λ-calculus, its extension with an explicit flattening
//! constructor, and the initial morphism `EVAL` that resolves flattenings.

use rand::Rng;

use crate::ctx::{Ctx, Leaf};
use crate::error::{scope, Error, Result};
use crate::gen::{sample_base_ctx, sample_fin_ctx, Generator};
use crate::gfold::{check_fusion_instance, map_boxed, BracketStep, FusionReport, MendlerStep, Rec};
use crate::laws::{Counterexample, LawReport};
use crate::oracle;
use crate::pointed::{PointedEndo, PointedMorphism};
use crate::signature::{sum_sig, theta_binding, theta_flat, Arity, Signature};
use crate::subst::{self, bracket_raw, mu_raw, shipped_morphisms, SubstRule};
use crate::system::{
    is_hss_morphism, is_monad_morphism, HssMorphismReport, InitialSystem, SubstitutionSystem, TermMorphism,
};
use crate::term::{validate, validate_mixed, Term};

pub const APP: usize = 0;
pub const ABS: usize = 1;
pub const FLAT: usize = 2;

/// The second application constructor of [`dupapp`]; abstraction is op 2
/// there.
pub const APP2: usize = 1;

pub fn lc() -> Signature {
    Signature::new(vec![Arity::Binding(vec![0, 0]), Arity::Binding(vec![1])])
}

pub fn lce() -> Signature {
    sum_sig(&lc(), &Signature::new(vec![Arity::Flattening]))
}

pub fn dupapp() -> Signature {
    Signature::new(vec![Arity::Binding(vec![0, 0]), Arity::Binding(vec![0, 0]), Arity::Binding(vec![1])])
}

pub fn app(f: Term, a: Term) -> Term {
    Term::Node(APP, vec![f, a])
}

pub fn lam(body: Term) -> Term {
    Term::Node(ABS, vec![body])
}

pub fn flat(payload: Term) -> Term {
    Term::Node(FLAT, vec![payload])
}

/// The inclusion of λ-terms into λ-terms with flattening; constructor ids
/// coincide, so this is the identity on representations.
pub fn embed(t: &Term) -> Term {
    t.clone()
}

/// `μ^Λ`: multiplication of the λ-calculus monad.
pub fn mu_lam(t: &Term, c: &Ctx) -> Result<Term> {
    if !validate(&lc(), &c.tm_over(), t) {
        return Err(scope(format!("term is not a λ-term over TmOver({c})")));
    }
    mu_raw(&lc(), t, c)
}

/// The `(Id + LCE)`-algebra structure on λ-terms: application and
/// abstraction build nodes, flattening is `μ^Λ`.
pub fn extended_algebra_apply(op: usize, args: &[Term], c: &Ctx) -> Result<Term> {
    match (op, args) {
        (APP, [_, _]) | (ABS, [_]) => Ok(Term::Node(op, args.to_vec())),
        (FLAT, [u]) => mu_lam(u, c),
        _ => Err(scope(format!("no payload of {} arguments for constructor {op}", args.len()))),
    }
}

/// `EVAL : Λμ -> Λ`. Leaves of `c` are left untouched, so boxed leaves of
/// the context may carry terms of either signature.
pub fn eval_flatten(t: &Term, c: &Ctx) -> Result<Term> {
    if !validate(&lce(), c, t) {
        return Err(scope(format!("term is not scope-valid over {c}")));
    }
    eval_raw(&lc(), t, c)
}

fn eval_raw(lc: &Signature, t: &Term, c: &Ctx) -> Result<Term> {
    match t {
        Term::Var(_) => Ok(t.clone()),
        Term::Node(APP, args) => Ok(Term::Node(
            APP,
            args.iter().map(|a| eval_raw(lc, a, c)).collect::<Result<Vec<_>>>()?,
        )),
        Term::Node(ABS, args) => Ok(lam(eval_raw(lc, &args[0], &c.ext())?)),
        Term::Node(FLAT, args) => {
            let outer = eval_raw(lc, &args[0], &c.tm_over())?;
            let inner = map_boxed(lc, &outer, |w| eval_raw(lc, w, c))?;
            mu_raw(lc, &inner, c)
        }
        Term::Node(op, _) => Err(Error::UnknownArity { op: *op, len: 3 }),
    }
}

/// `EVAL` as a Mendler fold with `Z = Id`.
pub struct EvalStep {
    lc: Signature,
    lce: Signature,
    z: PointedEndo,
}

impl EvalStep {
    pub fn new() -> Self {
        EvalStep { lc: lc(), lce: lce(), z: PointedEndo::Id }
    }
}

impl Default for EvalStep {
    fn default() -> Self {
        EvalStep::new()
    }
}

impl MendlerStep for EvalStep {
    type Out = Term;

    fn z(&self) -> &PointedEndo {
        &self.z
    }

    fn var(&self, _c: &Ctx, l: &Leaf) -> Result<Term> {
        Ok(Term::Var(l.clone()))
    }

    fn node(&self, c: &Ctx, op: usize, args: &[Term], rec: &Rec<'_, Term>) -> Result<Term> {
        match op {
            APP => Ok(app(rec(c, &args[0])?, rec(c, &args[1])?)),
            ABS => Ok(lam(rec(&c.ext(), &args[0])?)),
            FLAT => {
                let outer = rec(&c.tm_over(), &args[0])?;
                let inner = map_boxed(&self.lc, &outer, |w| rec(c, w))?;
                mu_raw(&self.lc, &inner, c)
            }
            _ => Err(Error::UnknownArity { op, len: 3 }),
        }
    }

    fn check_output(&self, c: &Ctx, out: &Term) -> Result<()> {
        if validate_mixed(&self.lc, &self.lce, c, out) {
            Ok(())
        } else {
            Err(Error::StepContract(format!("EVAL step produced a term not valid over {c}")))
        }
    }
}

/// The step `Ψ_{EVAL∘f}` of the extended system on `Λ`: a fold
/// `Λμ · Z -> Λ` whose constructor cases use the algebra
/// [`extended_algebra_apply`].
pub struct LambdaStep {
    lc: Signature,
    lce: Signature,
    f: PointedMorphism,
}

impl LambdaStep {
    pub fn new(f: PointedMorphism) -> Self {
        LambdaStep { lc: lc(), lce: lce(), f }
    }
}

impl MendlerStep for LambdaStep {
    type Out = Term;

    fn z(&self) -> &PointedEndo {
        self.f.z()
    }

    fn var(&self, c: &Ctx, l: &Leaf) -> Result<Term> {
        eval_raw(&self.lc, &self.f.component(c, l)?, c)
    }

    fn node(&self, c: &Ctx, op: usize, args: &[Term], rec: &Rec<'_, Term>) -> Result<Term> {
        match self.lce.arity(op)? {
            Arity::Binding(ks) => {
                let moved = theta_binding(&self.lce, ks, self.z(), args, c)?;
                let out = moved
                    .iter()
                    .zip(ks)
                    .map(|(a, &k)| rec(&c.ext_n(k), a))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Term::Node(op, out))
            }
            Arity::Flattening => {
                let d = self.z().on_ctx(c).tm_over();
                let outer = rec(&d, &theta_flat(&self.lce, self.z(), &args[0], c)?)?;
                let inner = map_boxed(&self.lc, &outer, |w| rec(c, w))?;
                mu_raw(&self.lc, &inner, c)
            }
        }
    }

    fn check_output(&self, c: &Ctx, out: &Term) -> Result<()> {
        if validate_mixed(&self.lc, &self.lce, c, out) {
            Ok(())
        } else {
            Err(Error::StepContract(format!("Λ step produced a term not valid over {c}")))
        }
    }
}

/// `(Λ, [α, μ^Λ])` with the λ-calculus bracket, as a substitution system
/// for the signature with flattening.
#[derive(Clone, Debug)]
pub struct ExtendedSystem {
    lc: Signature,
    lce: Signature,
}

impl ExtendedSystem {
    pub fn new() -> Self {
        ExtendedSystem { lc: lc(), lce: lce() }
    }
}

impl Default for ExtendedSystem {
    fn default() -> Self {
        ExtendedSystem::new()
    }
}

impl SubstitutionSystem for ExtendedSystem {
    fn name(&self) -> &str {
        "extended(Λ)"
    }

    fn signature(&self) -> &Signature {
        &self.lce
    }

    fn carrier(&self) -> &Signature {
        &self.lc
    }

    fn tau(&self, c: &Ctx, op: usize, args: &[Term]) -> Result<Term> {
        match (op, args) {
            (FLAT, [u]) => mu_raw(&self.lc, u, c),
            _ => extended_algebra_apply(op, args, c),
        }
    }

    fn bracket(&self, f: &PointedMorphism, t: &Term, c: &Ctx) -> Result<Term> {
        let zc = f.z().on_ctx(c);
        let leaf_sig = f.z().term_signature().unwrap_or(&self.lc);
        if !validate_mixed(&self.lc, leaf_sig, &zc, t) {
            return Err(scope(format!("term is not a λ-term over {zc}")));
        }
        bracket_raw(&self.lc, f, t, c)
    }
}

pub fn eval_morphism() -> TermMorphism {
    TermMorphism::new("eval", |c, t| eval_raw(&lc(), t, c))
}

/// Swaps the two application constructors of [`dupapp`], recursively.
pub fn swap_apps(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Node(op, args) => {
            let op = match *op {
                APP => APP2,
                APP2 => APP,
                other => other,
            };
            Term::Node(op, args.iter().map(swap_apps).collect())
        }
    }
}

pub fn swap_morphism() -> TermMorphism {
    TermMorphism::new("swap", |_, t| Ok(swap_apps(t)))
}

/// `EVAL ∘ {f} = {EVAL ∘ f}' ∘ (EVAL · Z)`, one report per shipped `f`.
pub fn check_init_compat(samples: usize, seed: u64) -> Vec<LawReport> {
    let src = InitialSystem::new(&lce());
    let tgt = ExtendedSystem::new();
    let beta = eval_morphism();
    let gen_sig = lce();
    let gen = Generator::new(&gen_sig);
    shipped_morphisms(&gen_sig)
        .into_iter()
        .map(|f| {
            LawReport::run(&format!("init-compat[{}]", f.name()), samples, seed, |_, rng| {
                let c = sample_base_ctx(rng);
                let zc = f.z().on_ctx(&c);
                let t = gen.term_upto(rng, &zc, 25)?;
                let lhs = beta.apply(&c, &src.bracket(&f, &t, &c)?)?;
                let b = beta.clone();
                let f2 = f.post_compose("eval", move |c, t| b.apply(c, t));
                let rhs = tgt.bracket(&f2, &beta.apply(&zc, &t)?, &c)?;
                Ok((lhs != rhs).then(|| Counterexample::new(&t, &zc, &gen_sig, "EVAL ∘ {f} ≠ {EVAL ∘ f}' ∘ EVAL")))
            })
        })
        .collect()
}

pub fn check_eval_hss_morphism(samples: usize, seed: u64) -> HssMorphismReport {
    is_hss_morphism(&InitialSystem::new(&lce()), &ExtendedSystem::new(), &eval_morphism(), samples, seed)
}

pub fn check_eval_monad_morphism(samples: usize, seed: u64) -> LawReport {
    is_monad_morphism(&InitialSystem::new(&lce()), &ExtendedSystem::new(), &eval_morphism(), samples, seed)
}

/// EVAL by direct recursion against EVAL as a fold; also `EVAL ∘ embed =
/// id` and idempotence.
pub fn check_eval_agreement(samples: usize, seed: u64) -> LawReport {
    let (lc_sig, lce_sig) = (lc(), lce());
    let gen = Generator::new(&lce_sig);
    let gen_lc = Generator::new(&lc_sig);
    let step = EvalStep::new();
    LawReport::run("eval-agreement", samples, seed, |_, rng| {
        let c = sample_base_ctx(rng);
        let t = gen.term_upto(rng, &c, 25)?;
        let direct = eval_flatten(&t, &c)?;
        let folded = crate::gfold::mendler_gfold(&lce_sig, &step, &t, &c)?;
        if direct != folded {
            return Ok(Some(Counterexample::new(&t, &c, &lce_sig, "direct EVAL ≠ gfold EVAL")));
        }
        if eval_flatten(&embed(&direct), &c)? != direct {
            return Ok(Some(Counterexample::new(&t, &c, &lce_sig, "EVAL not idempotent")));
        }
        let plain = gen_lc.term_upto(rng, &c, 25)?;
        if eval_flatten(&embed(&plain), &c)? != plain {
            return Ok(Some(Counterexample::new(&plain, &c, &lc_sig, "EVAL ∘ embed ≠ id")));
        }
        Ok(None)
    })
}

/// EVAL against the oracle on LCE terms, and `subst` against the oracle on
/// LC terms, over `Fin(0..=3)`.
pub fn check_oracle_equivalence(samples: usize, seed: u64) -> Vec<LawReport> {
    let (lc_sig, lce_sig) = (lc(), lce());
    let gen = Generator::new(&lce_sig);
    let gen_lc = Generator::new(&lc_sig);
    let eval = LawReport::run("oracle-equivalence[eval]", samples, seed, |_, rng| {
        let c = sample_fin_ctx(rng, 3);
        let t = gen.term_upto(rng, &c, 25)?;
        let ours = eval_flatten(&t, &c)?;
        let theirs = oracle::naive_flatten(&lce_sig, &t, &c)?;
        Ok((ours != theirs).then(|| Counterexample::new(&t, &c, &lce_sig, "EVAL ≠ naive flatten")))
    });
    let subst = LawReport::run("oracle-equivalence[subst]", samples, seed, |_, rng| {
        let n = rng.gen_range(0..=3);
        let m = rng.gen_range(0..=3);
        let (src, tgt) = (Ctx::Fin(n), Ctx::Fin(m));
        let t = gen_lc.term_upto(rng, &src, 25)?;
        let sigma = (0..n)
            .map(|_| gen_lc.term_upto(rng, &tgt, 8))
            .collect::<Result<Vec<_>>>()?;
        let rule = SubstRule::new(&lc_sig, src.clone(), tgt.clone(), sigma.clone())?;
        let ours = subst::subst(&lc_sig, &rule, &t)?;
        let theirs = oracle::naive_subst(&lc_sig, &t, n, &sigma, &tgt)?;
        Ok((ours != theirs).then(|| Counterexample::new(&t, &src, &lc_sig, "subst ≠ naive subst")))
    });
    vec![eval, subst]
}

/// The reflexive fusion instance on `sig`.
pub fn fusion_reflexive(sig: &Signature, samples: usize, seed: u64) -> FusionReport {
    let step = BracketStep::new(sig, PointedMorphism::identity_on(sig));
    check_fusion_instance("reflexive", sig, &step, &step, |_, t: &Term| Ok(t.clone()), &[], samples, seed)
}

/// `φ = EVAL ∘ -`, `Ψ = Ψ_f` in LCE and `Ψ' = Ψ_{EVAL∘f}` on `Λ`.
pub fn fusion_eval(f: &PointedMorphism, samples: usize, seed: u64) -> FusionReport {
    let lce_sig = lce();
    let lc_sig = lc();
    let psi = BracketStep::new(&lce_sig, f.clone());
    let psi_prime = LambdaStep::new(f.clone());
    // a second handle, natural but not the fold itself
    let other = BracketStep::new(&lce_sig, f.clone());
    let swapped = |c: &Ctx, t: &Term| -> Result<Term> {
        let v = crate::gfold::mendler_gfold(&lce_sig, &other, t, c)?;
        Ok(match v {
            Term::Node(APP, args) => app(args[1].clone(), args[0].clone()),
            v => v,
        })
    };
    check_fusion_instance(
        &format!("eval/{}", f.name()),
        &lce_sig,
        &psi,
        &psi_prime,
        move |c, t: &Term| eval_raw(&lc_sig, t, c),
        &[&swapped],
        samples,
        seed,
    )
}

/// A φ that does not commute with the step: it swaps application
/// arguments everywhere.
pub fn fusion_broken(samples: usize, seed: u64) -> FusionReport {
    let lc_sig = lc();
    let step = BracketStep::new(&lc_sig, PointedMorphism::identity_on(&lc_sig));
    check_fusion_instance("broken-swap", &lc_sig, &step, &step, |_, t: &Term| Ok(swap_arguments(t)), &[], samples, seed)
}

/// Reverses the arguments of every application node.
pub fn swap_arguments(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Node(APP, args) => app(swap_arguments(&args[1]), swap_arguments(&args[0])),
        Term::Node(op, args) => Term::Node(*op, args.iter().map(swap_arguments).collect()),
    }
}

/// The swap endomorphism on [`dupapp`] is a monad morphism but not a
/// morphism of substitution systems.
#[derive(Clone, Debug)]
pub struct NonfullnessWitness {
    pub monad_morphism: LawReport,
    pub hss_morphism: HssMorphismReport,
    /// `App(Var 0, Var 1)` over `Fin(2)`.
    pub counterexample: Term,
    /// `swap(τ(App, x))` and `τ(App, H(swap) x)` on the counterexample.
    pub lhs: Term,
    pub rhs: Term,
}

impl NonfullnessWitness {
    /// Monad-morphism suite clean, τ square failing on the stored term.
    pub fn shows_nonfullness(&self) -> bool {
        self.monad_morphism.passed() && self.lhs != self.rhs && !self.hss_morphism.tau_square.passed()
    }
}

pub fn nonfullness_witness(samples: usize, seed: u64) -> Result<NonfullnessWitness> {
    let sys = InitialSystem::new(&dupapp());
    let swap = swap_morphism();
    let c = Ctx::Fin(2);
    let args = [Term::idx(0), Term::idx(1)];
    let counterexample = sys.tau(&c, APP, &args)?;
    let lhs = swap.apply(&c, &counterexample)?;
    let mapped = args.iter().map(|a| swap.apply(&c, a)).collect::<Result<Vec<_>>>()?;
    let rhs = sys.tau(&c, APP, &mapped)?;
    Ok(NonfullnessWitness {
        monad_morphism: is_monad_morphism(&sys, &sys, &swap, samples, seed),
        hss_morphism: is_hss_morphism(&sys, &sys, &swap, samples, seed),
        counterexample,
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(l: Leaf) -> Term {
        Term::Var(l)
    }

    fn id0() -> Term {
        lam(var(Leaf::New))
    }

    fn boxed(t: Term) -> Term {
        var(Leaf::boxed(t))
    }

    #[test]
    fn named_signatures() {
        assert_eq!(lce().len(), 3);
        assert_eq!(lce().arities()[2], Arity::Flattening);
        assert_eq!(dupapp().arity(ABS + 1).unwrap(), &Arity::Binding(vec![1]));
    }

    #[test]
    fn mu_lam_examples() {
        assert_eq!(mu_lam(&boxed(id0()), &Ctx::Fin(0)).unwrap(), id0());
        let t = app(boxed(Term::idx(0)), boxed(Term::idx(0)));
        assert_eq!(mu_lam(&t, &Ctx::Fin(1)).unwrap(), app(Term::idx(0), Term::idx(0)));
        let t = lam(var(Leaf::old(Leaf::boxed(Term::idx(0)))));
        assert_eq!(mu_lam(&t, &Ctx::Fin(1)).unwrap(), lam(var(Leaf::old(Leaf::Idx(0)))));
    }

    #[test]
    fn algebra_examples() {
        let c = Ctx::Fin(2);
        assert_eq!(
            extended_algebra_apply(APP, &[Term::idx(0), Term::idx(1)], &c).unwrap(),
            app(Term::idx(0), Term::idx(1))
        );
        assert_eq!(extended_algebra_apply(FLAT, &[boxed(id0())], &Ctx::Fin(0)).unwrap(), id0());
        let u = app(boxed(id0()), boxed(Term::idx(0)));
        assert_eq!(extended_algebra_apply(FLAT, &[u], &Ctx::Fin(1)).unwrap(), app(id0(), Term::idx(0)));
        assert!(extended_algebra_apply(FLAT, &[], &c).is_err());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_flatten(&flat(boxed(id0())), &Ctx::Fin(0)).unwrap(), id0());
        let t = flat(app(boxed(id0()), boxed(Term::idx(0))));
        assert_eq!(eval_flatten(&t, &Ctx::Fin(1)).unwrap(), app(id0(), Term::idx(0)));
        let plain = lam(app(var(Leaf::New), var(Leaf::old(Leaf::Idx(0)))));
        assert_eq!(eval_flatten(&embed(&plain), &Ctx::Fin(1)).unwrap(), plain);
    }

    #[test]
    fn eval_shifts_under_binders() {
        // flat{ (0 0) | λ.(0 1) } over Fin(1)
        let env = lam(app(var(Leaf::New), var(Leaf::old(Leaf::Idx(0)))));
        let t = flat(app(boxed(env.clone()), boxed(env.clone())));
        assert_eq!(eval_flatten(&t, &Ctx::Fin(1)).unwrap(), app(env.clone(), env));
        // flat{ λ.(1 0) | 0 }: the outer binder must not capture
        let t = flat(lam(app(var(Leaf::old(Leaf::boxed(Term::idx(0)))), var(Leaf::New))));
        assert_eq!(
            eval_flatten(&t, &Ctx::Fin(1)).unwrap(),
            lam(app(var(Leaf::old(Leaf::Idx(0))), var(Leaf::New)))
        );
    }

    #[test]
    fn swap_definition() {
        let t = app(Term::idx(0), Term::idx(1));
        assert_eq!(swap_apps(&t), Term::Node(APP2, vec![Term::idx(0), Term::idx(1)]));
        assert_eq!(swap_apps(&swap_apps(&t)), t);
    }

    #[test]
    fn small_suites() {
        for r in check_init_compat(60, 2) {
            assert!(r.passed(), "{r}");
        }
        assert!(check_eval_hss_morphism(60, 2).passed());
        assert!(check_eval_monad_morphism(60, 2).passed());
        assert!(check_eval_agreement(60, 2).passed());
        for r in check_oracle_equivalence(60, 2) {
            assert!(r.passed(), "{r}");
        }
        let w = nonfullness_witness(60, 2).unwrap();
        assert!(w.shows_nonfullness());
    }

    #[test]
    fn fusion_instances() {
        assert!(fusion_reflexive(&lce(), 40, 4).passed());
        for f in shipped_morphisms(&lce()) {
            let r = fusion_eval(&f, 40, 4);
            assert!(r.passed(), "{:?}", r);
        }
        assert!(fusion_broken(40, 4).premise.failures > 0);
    }
}
