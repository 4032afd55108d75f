//! Substitution systems as data, and checks that a term transformer is a
//! morphism of substitution systems or of the induced monads.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::ctx::{Ctx, Leaf};
use crate::error::{scope, Result};
use crate::gen::{sample_base_ctx, Generator};
use crate::gfold::map_boxed;
use crate::laws::{Counterexample, LawReport};
use crate::pointed::PointedMorphism;
use crate::signature::{Arity, Signature};
use crate::subst::{bracket, shipped_morphisms};
use crate::term::Term;

/// An `(Id + H)`-algebra with a bracket. Carrier values are terms of
/// `carrier()`; `H` is described by `signature()`.
pub trait SubstitutionSystem: Sync {
    fn name(&self) -> &str;

    /// The signature `H`.
    fn signature(&self) -> &Signature;

    /// The signature whose terms represent carrier values.
    fn carrier(&self) -> &Signature;

    fn eta(&self, _c: &Ctx, l: &Leaf) -> Result<Term> {
        Ok(Term::Var(l.clone()))
    }

    /// The `H`-algebra structure on a payload of carrier values.
    fn tau(&self, c: &Ctx, op: usize, args: &[Term]) -> Result<Term>;

    /// `{f}` for `f : (Z, e) -> (carrier, η)`.
    fn bracket(&self, f: &PointedMorphism, t: &Term, c: &Ctx) -> Result<Term>;

    fn mu(&self, t: &Term, c: &Ctx) -> Result<Term> {
        self.bracket(&PointedMorphism::identity_on(self.carrier()), t, c)
    }
}

/// The initial system: syntax over `sig`.
#[derive(Clone, Debug)]
pub struct InitialSystem {
    sig: Signature,
    name: String,
}

impl InitialSystem {
    pub fn new(sig: &Signature) -> Self {
        InitialSystem { sig: sig.clone(), name: format!("initial({sig})") }
    }
}

impl SubstitutionSystem for InitialSystem {
    fn name(&self) -> &str {
        &self.name
    }

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn carrier(&self) -> &Signature {
        &self.sig
    }

    fn tau(&self, _c: &Ctx, op: usize, args: &[Term]) -> Result<Term> {
        let arity = self.sig.arity(op)?;
        if arity.arg_count() != args.len() {
            return Err(scope(format!("constructor {op} takes {} arguments", arity.arg_count())));
        }
        Ok(Term::Node(op, args.to_vec()))
    }

    fn bracket(&self, f: &PointedMorphism, t: &Term, c: &Ctx) -> Result<Term> {
        bracket(&self.sig, f, t, c)
    }
}

pub type MorphismFn = dyn Fn(&Ctx, &Term) -> Result<Term> + Send + Sync;

/// A transformer between carriers, applied at each context.
#[derive(Clone)]
pub struct TermMorphism {
    name: String,
    apply: Arc<MorphismFn>,
}

impl fmt::Debug for TermMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TermMorphism({})", self.name)
    }
}

impl TermMorphism {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Ctx, &Term) -> Result<Term> + Send + Sync + 'static,
    {
        TermMorphism { name: name.into(), apply: Arc::new(f) }
    }

    pub fn identity() -> Self {
        TermMorphism::new("identity", |_, t| Ok(t.clone()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, c: &Ctx, t: &Term) -> Result<Term> {
        (self.apply)(c, t)
    }
}

/// `H(β)` on a payload of constructor `op` at context `c`.
fn h_map(src: &dyn SubstitutionSystem, tgt: &dyn SubstitutionSystem, beta: &TermMorphism, op: usize, args: &[Term], c: &Ctx) -> Result<Vec<Term>> {
    match src.signature().arity(op)? {
        Arity::Binding(ks) => args.iter().zip(ks).map(|(a, &k)| beta.apply(&c.ext_n(k), a)).collect(),
        Arity::Flattening => {
            // β * β = T'(β_c) ∘ β_{T c}
            let inner = beta.apply(&c.tm_over(), &args[0])?;
            Ok(vec![map_boxed(tgt.carrier(), &inner, |w| beta.apply(c, w))?])
        }
    }
}

/// A random payload for constructor `op`, with carrier values of `sys`.
fn random_payload<R: Rng>(gen: &Generator<'_>, sys: &dyn SubstitutionSystem, rng: &mut R, op: usize, c: &Ctx, budget: usize) -> Result<Vec<Term>> {
    match sys.signature().arity(op)? {
        Arity::Binding(ks) => ks.iter().map(|&k| gen.term(rng, &c.ext_n(k), budget)).collect(),
        Arity::Flattening => Ok(vec![gen.term(rng, &c.tm_over(), budget)?]),
    }
}

/// Per-diagram results of [`is_hss_morphism`].
#[derive(Clone, Debug)]
pub struct HssMorphismReport {
    pub eta_triangle: LawReport,
    pub tau_square: LawReport,
    pub bracket_squares: Vec<LawReport>,
}

impl HssMorphismReport {
    pub fn reports(&self) -> Vec<&LawReport> {
        let mut out = vec![&self.eta_triangle, &self.tau_square];
        out.extend(self.bracket_squares.iter());
        out
    }

    pub fn passed(&self) -> bool {
        self.reports().iter().all(|r| r.passed())
    }
}

/// Checks the three diagrams of a morphism of substitution systems: the
/// `η` triangle, the `τ` square, and `β ∘ {f} = {β ∘ f}' ∘ (β·Z)` for the
/// shipped `f`.
pub fn is_hss_morphism(
    src: &dyn SubstitutionSystem,
    tgt: &dyn SubstitutionSystem,
    beta: &TermMorphism,
    samples: usize,
    seed: u64,
) -> HssMorphismReport {
    let sig = src.carrier();
    let gen = Generator::new(sig);
    let prefix = format!("hss-morphism[{}]", beta.name());

    let eta_triangle = eta_triangle(src, tgt, beta, &format!("{prefix}/eta-triangle"), samples, seed);

    let tau_square = LawReport::run(&format!("{prefix}/tau-square"), samples, seed, |_, rng| {
        let c = sample_base_ctx(rng);
        let op = rng.gen_range(0..src.signature().len());
        let b = rng.gen_range(0..=12);
        let args = random_payload(&gen, src, rng, op, &c, b)?;
        let lhs = beta.apply(&c, &src.tau(&c, op, &args)?)?;
        let rhs = tgt.tau(&c, op, &h_map(src, tgt, beta, op, &args, &c)?)?;
        let input = Term::Node(op, args);
        Ok((lhs != rhs).then(|| Counterexample::new(&input, &c, src.signature(), "τ square")))
    });

    let bracket_squares = shipped_morphisms(sig)
        .into_iter()
        .map(|f| {
            let suite = format!("{prefix}/bracket-square[{}]", f.name());
            LawReport::run(&suite, samples, seed, |_, rng| {
                let c = sample_base_ctx(rng);
                let zc = f.z().on_ctx(&c);
                let t = gen.term_upto(rng, &zc, 20)?;
                let lhs = beta.apply(&c, &src.bracket(&f, &t, &c)?)?;
                let b = beta.clone();
                let f2 = f.post_compose(beta.name(), move |c, t| b.apply(c, t));
                let rhs = tgt.bracket(&f2, &beta.apply(&zc, &t)?, &c)?;
                Ok((lhs != rhs).then(|| Counterexample::new(&t, &zc, sig, "bracket square")))
            })
        })
        .collect();

    HssMorphismReport { eta_triangle, tau_square, bracket_squares }
}

fn eta_triangle(
    src: &dyn SubstitutionSystem,
    tgt: &dyn SubstitutionSystem,
    beta: &TermMorphism,
    suite: &str,
    samples: usize,
    seed: u64,
) -> LawReport {
    let sig = src.carrier();
    let gen = Generator::new(sig);
    LawReport::run(suite, samples, seed, |_, rng| {
        let c = sample_base_ctx(rng);
        let Ok(l) = gen.leaf(rng, &c, 0) else { return Ok(None) };
        let lhs = beta.apply(&c, &src.eta(&c, &l)?)?;
        let rhs = tgt.eta(&c, &l)?;
        Ok((lhs != rhs).then(|| Counterexample::new(&Term::Var(l), &c, sig, "η triangle")))
    })
}

/// `β ∘ η = η'` and `β ∘ μ = μ' ∘ (β * β)` on samples.
pub fn is_monad_morphism(
    src: &dyn SubstitutionSystem,
    tgt: &dyn SubstitutionSystem,
    beta: &TermMorphism,
    samples: usize,
    seed: u64,
) -> LawReport {
    let sig = src.carrier();
    let gen = Generator::new(sig);
    LawReport::run(&format!("monad-morphism[{}]", beta.name()), samples, seed, |_, rng| {
        let c = sample_base_ctx(rng);
        if let Ok(l) = gen.leaf(rng, &c, 0) {
            if beta.apply(&c, &src.eta(&c, &l)?)? != tgt.eta(&c, &l)? {
                return Ok(Some(Counterexample::new(&Term::Var(l), &c, sig, "unit")));
            }
        }
        let tc = c.tm_over();
        let t = gen.term_upto(rng, &tc, 20)?;
        let lhs = beta.apply(&c, &src.mu(&t, &c)?)?;
        let inner = beta.apply(&tc, &t)?;
        let rhs = tgt.mu(&map_boxed(tgt.carrier(), &inner, |w| beta.apply(&c, w))?, &c)?;
        Ok((lhs != rhs).then(|| Counterexample::new(&t, &tc, sig, "multiplication")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten;

    #[test]
    fn identity_is_an_hss_morphism() {
        let lc = flatten::lc();
        let sys = InitialSystem::new(&lc);
        let r = is_hss_morphism(&sys, &sys, &TermMorphism::identity(), 80, 5);
        assert!(r.passed());
        assert!(is_monad_morphism(&sys, &sys, &TermMorphism::identity(), 80, 5).passed());
    }

    #[test]
    fn a_non_natural_transformer_is_caught() {
        let lc = flatten::lc();
        let sys = InitialSystem::new(&lc);
        // collapses every term to its first free variable or λ.0
        let beta = TermMorphism::new("collapse", |_, t| match t {
            Term::Var(_) => Ok(t.clone()),
            _ => Ok(flatten::lam(Term::Var(Leaf::New))),
        });
        assert!(!is_hss_morphism(&sys, &sys, &beta, 80, 5).passed());
    }
}
