//! Generalized Mendler-style iteration over `T · Z` and a harness for the
//! fusion law.
//!
//! A step bundle describes one stage of a fold `h : T·Z -> X`: what to do at a
//! variable, and what to do at a constructor given the raw payload and a
//! handle `rec` for recursive calls. The handle is callable at any context,
//! which is what lets a step push `Z` under binders through the strength.
//! Termination is enforced rather than assumed: every call through `rec`
//! must be on a term with strictly fewer constructor nodes.

use std::fmt::Debug;

use crate::ctx::{Ctx, Leaf};
use crate::error::{Error, Result};
use crate::gen::{sample_base_ctx, Generator};
use crate::laws::{Counterexample, LawReport};
use crate::pointed::{PointedEndo, PointedMorphism};
use crate::signature::{theta_binding, theta_flat, Arity, Signature};
use crate::term::{map_leaves_raw, validate, validate_mixed, Term};

pub type Rec<'a, X> = dyn Fn(&Ctx, &Term) -> Result<X> + 'a;

pub trait MendlerStep: Sync {
    type Out: Clone + PartialEq + Debug + Send;

    /// The pointed endofunctor the fold is parameterized by.
    fn z(&self) -> &PointedEndo;

    /// `h_c(Var l)` for a leaf `l` of `Z(c)`.
    fn var(&self, c: &Ctx, l: &Leaf) -> Result<Self::Out>;

    /// `h_c(Node(op, args))` where `args` is the payload over `Z(c)`.
    fn node(&self, c: &Ctx, op: usize, args: &[Term], rec: &Rec<'_, Self::Out>) -> Result<Self::Out>;

    /// Target validity of a value produced at `c`.
    fn check_output(&self, _c: &Ctx, _out: &Self::Out) -> Result<()> {
        Ok(())
    }
}

/// The unique `h` with `h ∘ In = Ψ(h)`, computed by structural recursion.
pub fn mendler_gfold<S: MendlerStep>(sig: &Signature, psi: &S, t: &Term, c: &Ctx) -> Result<S::Out> {
    let zc = psi.z().on_ctx(c);
    let leaf_sig = psi.z().term_signature().unwrap_or(sig);
    if !validate_mixed(sig, leaf_sig, &zc, t) {
        return Err(Error::Scope(format!("gfold input is not scope-valid over {zc}")));
    }
    fold(psi, c, t)
}

fn fold<S: MendlerStep>(psi: &S, c: &Ctx, t: &Term) -> Result<S::Out> {
    let out = match t {
        Term::Var(l) => psi.var(c, l)?,
        Term::Node(op, args) => {
            let bound = t.node_count();
            let rec = move |c2: &Ctx, t2: &Term| -> Result<S::Out> {
                let n = t2.node_count();
                if n >= bound {
                    return Err(Error::NonDescending { arg: n, bound });
                }
                fold(psi, c2, t2)
            };
            psi.node(c, *op, args, &rec)?
        }
    };
    psi.check_output(c, &out)?;
    Ok(out)
}

/// `Ψ_f(h) = [f, τ] ∘ H h ∘ θ`: folding with it yields the bracket `{f}`.
/// The flattening case is the unsimplified composite, so this fold is an
/// independent check on [`crate::subst::bracket`].
pub struct BracketStep {
    sig: Signature,
    f: PointedMorphism,
}

impl BracketStep {
    pub fn new(sig: &Signature, f: PointedMorphism) -> Self {
        BracketStep { sig: sig.clone(), f }
    }
}

impl MendlerStep for BracketStep {
    type Out = Term;

    fn z(&self) -> &PointedEndo {
        self.f.z()
    }

    fn var(&self, c: &Ctx, l: &Leaf) -> Result<Term> {
        self.f.component(c, l)
    }

    fn node(&self, c: &Ctx, op: usize, args: &[Term], rec: &Rec<'_, Term>) -> Result<Term> {
        match self.sig.arity(op)? {
            Arity::Binding(ks) => {
                let moved = theta_binding(&self.sig, ks, self.z(), args, c)?;
                let out = moved
                    .iter()
                    .zip(ks)
                    .map(|(a, &k)| rec(&c.ext_n(k), a))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Term::Node(op, out))
            }
            Arity::Flattening => {
                let d = self.z().on_ctx(c).tm_over();
                let inner = rec(&d, &theta_flat(&self.sig, self.z(), &args[0], c)?)?;
                let payload = map_boxed(&self.sig, &inner, |w| rec(c, w))?;
                Ok(Term::Node(op, vec![payload]))
            }
        }
    }

    fn check_output(&self, c: &Ctx, out: &Term) -> Result<()> {
        let leaf_sig = self.z().term_signature().unwrap_or(&self.sig);
        if validate_mixed(&self.sig, leaf_sig, c, out) {
            Ok(())
        } else {
            Err(Error::StepContract(format!("bracket step produced a term not valid over {c}")))
        }
    }
}

/// Replaces every boxed base leaf `Boxed(w)` of `t` by `Boxed(g(w))`.
pub fn map_boxed<G>(sig: &Signature, t: &Term, g: G) -> Result<Term>
where
    G: Fn(&Term) -> Result<Term>,
{
    map_leaves_raw(
        sig,
        &|l: &Leaf| match l {
            Leaf::Boxed(w) => Ok(Leaf::boxed(g(w)?)),
            other => Err(Error::Scope(format!("{other:?} is not a boxed term"))),
        },
        t,
    )
}

/// Term size as a fold with `Z = Id`.
pub struct SizeStep {
    sig: Signature,
}

impl SizeStep {
    pub fn new(sig: &Signature) -> Self {
        SizeStep { sig: sig.clone() }
    }
}

impl MendlerStep for SizeStep {
    type Out = usize;

    fn z(&self) -> &PointedEndo {
        &PointedEndo::Id
    }

    fn var(&self, _c: &Ctx, l: &Leaf) -> Result<usize> {
        Ok(1 + l.content_size())
    }

    fn node(&self, c: &Ctx, op: usize, args: &[Term], rec: &Rec<'_, usize>) -> Result<usize> {
        let mut total = 1;
        match self.sig.arity(op)? {
            Arity::Binding(ks) => {
                for (a, &k) in args.iter().zip(ks) {
                    total += rec(&c.ext_n(k), a)?;
                }
            }
            Arity::Flattening => total += rec(&c.tm_over(), &args[0])?,
        }
        Ok(total)
    }
}

pub type Handle<'a, X> = dyn Fn(&Ctx, &Term) -> Result<X> + Sync + 'a;

/// Outcome of a fusion check: the premise `φ ∘ Ψ = Ψ' ∘ φ` on sampled
/// payloads and handles, and the conclusion `φ ∘ gfold Ψ = gfold Ψ'` on
/// sampled terms.
#[derive(Clone, Debug)]
pub struct FusionReport {
    pub premise: LawReport,
    pub conclusion: LawReport,
}

impl FusionReport {
    pub fn passed(&self) -> bool {
        self.premise.passed() && self.conclusion.passed()
    }
}

/// Checks the fusion law for `φ : X -> X'` (post-composition, natural in the
/// context) between the folds of `psi` and `psi_prime`.
///
/// The premise is checked at the handle `gfold psi` and at every handle in
/// `extra_handles`; variable payloads are included.
#[allow(clippy::too_many_arguments)]
pub fn check_fusion_instance<P, Q, F>(
    name: &str,
    sig: &Signature,
    psi: &P,
    psi_prime: &Q,
    phi: F,
    extra_handles: &[&Handle<'_, P::Out>],
    samples: usize,
    seed: u64,
) -> FusionReport
where
    P: MendlerStep,
    Q: MendlerStep,
    F: Fn(&Ctx, &P::Out) -> Result<Q::Out> + Sync,
{
    let gen = Generator::new(sig);
    let z = psi.z();
    let fold_psi = |c: &Ctx, t: &Term| fold(psi, c, t);
    let mut handles: Vec<&Handle<'_, P::Out>> = vec![&fold_psi];
    handles.extend_from_slice(extra_handles);

    let premise = LawReport::run(&format!("fusion[{name}]/premise"), samples, seed, |_, rng| {
        let c = sample_base_ctx(rng);
        let zc = z.on_ctx(&c);
        let budget = rand::Rng::gen_range(rng, 0..=15);
        let t = gen.node(rng, &zc, budget)?;
        let (op, args) = match &t {
            Term::Node(op, args) => (*op, args.as_slice()),
            Term::Var(_) => unreachable!("node() builds a constructor"),
        };
        let leaf = gen.leaf(rng, &zc, budget).ok();
        for h in &handles {
            let lhs = phi(&c, &psi.node(&c, op, args, h)?)?;
            let phi_h = |c2: &Ctx, t2: &Term| phi(c2, &h(c2, t2)?);
            let rhs = psi_prime.node(&c, op, args, &phi_h)?;
            if lhs != rhs {
                return Ok(Some(Counterexample::new(&t, &zc, sig, "φ ∘ Ψ(h) ≠ Ψ'(φ ∘ h) at a node")));
            }
            if let Some(l) = &leaf {
                if phi(&c, &psi.var(&c, l)?)? != psi_prime.var(&c, l)? {
                    let v = Term::Var(l.clone());
                    return Ok(Some(Counterexample::new(&v, &zc, sig, "φ ∘ Ψ ≠ Ψ' at a variable")));
                }
            }
        }
        Ok(None)
    });

    let conclusion = LawReport::run(&format!("fusion[{name}]/conclusion"), samples, seed, |_, rng| {
        let c = sample_base_ctx(rng);
        let zc = z.on_ctx(&c);
        let budget = rand::Rng::gen_range(rng, 0..=20);
        let t = gen.term(rng, &zc, budget)?;
        let lhs = phi(&c, &mendler_gfold(sig, psi, &t, &c)?)?;
        let rhs = mendler_gfold(sig, psi_prime, &t, &c)?;
        Ok((lhs != rhs).then(|| Counterexample::new(&t, &zc, sig, "φ ∘ gfold Ψ ≠ gfold Ψ'")))
    });

    FusionReport { premise, conclusion }
}

/// The defining equation `h(In x) = Ψ(h)(x)` and agreement of the
/// bracket fold with the inlined bracket, on sampled terms over `Z(c)`.
pub fn check_bracket_gfold_agreement(sig: &Signature, f: &PointedMorphism, samples: usize, seed: u64) -> LawReport {
    let gen = Generator::new(sig);
    let step = BracketStep::new(sig, f.clone());
    LawReport::run(&format!("gfold-agreement[{}]", f.name()), samples, seed, |_, rng| {
        let c = sample_base_ctx(rng);
        let zc = f.z().on_ctx(&c);
        let budget = rand::Rng::gen_range(rng, 0..=25);
        let t = gen.term(rng, &zc, budget)?;
        let folded = mendler_gfold(sig, &step, &t, &c)?;
        if folded != crate::subst::bracket(sig, f, &t, &c)? {
            return Ok(Some(Counterexample::new(&t, &zc, sig, "gfold bracket ≠ inlined bracket")));
        }
        if let Term::Node(op, args) = &t {
            let rec = |c2: &Ctx, t2: &Term| fold(&step, c2, t2);
            if step.node(&c, *op, args, &rec)? != folded {
                return Ok(Some(Counterexample::new(&t, &zc, sig, "h(In x) ≠ Ψ(h)(x)")));
            }
        }
        Ok(None)
    })
}

/// Valid-over-`c` check usable from step bundles.
pub fn expect_valid(sig: &Signature, c: &Ctx, t: &Term, what: &str) -> Result<()> {
    if validate(sig, c, t) {
        Ok(())
    } else {
        Err(Error::StepContract(format!("{what} produced a term not valid over {c}")))
    }
}
