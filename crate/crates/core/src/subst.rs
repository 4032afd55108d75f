//! The bracket `{f}` on the initial algebra, the monad multiplication, and
//! parallel substitution derived from it.

use std::collections::HashMap;

use crate::ctx::{Ctx, Leaf};
use crate::error::{scope, Result};
use crate::gen;
use crate::pointed::{PointedEndo, PointedMorphism, PointedTransform};
use crate::signature::{theta_binding, theta_flat, Arity, Signature};
use crate::term::{map_leaves_raw, validate, validate_mixed, Term};

/// `{f}` at context `c`: `t` is a term over `Z(c)`, the result a term over
/// `c`.
///
/// Binding arguments are moved along the strength before recursing. For a
/// flattening node the composite `τ ∘ H{f} ∘ θ` reduces, using `f ∘ e = η`,
/// to bracketing every boxed leaf of the payload; see
/// [`bracket_flat_unsimplified`] for the composite itself.
pub fn bracket(sig: &Signature, f: &PointedMorphism, t: &Term, c: &Ctx) -> Result<Term> {
    let zc = f.z().on_ctx(c);
    let leaf_sig = f.z().term_signature().unwrap_or(sig);
    if !validate_mixed(sig, leaf_sig, &zc, t) {
        return Err(scope(format!("term is not scope-valid over {zc}")));
    }
    bracket_raw(sig, f, t, c)
}

pub(crate) fn bracket_raw(sig: &Signature, f: &PointedMorphism, t: &Term, c: &Ctx) -> Result<Term> {
    match t {
        Term::Var(l) => f.component(c, l),
        Term::Node(op, args) => match sig.arity(*op)? {
            Arity::Binding(ks) => {
                let moved = theta_binding(sig, ks, f.z(), args, c)?;
                let args = moved
                    .iter()
                    .zip(ks)
                    .map(|(a, &k)| bracket_raw(sig, f, a, &c.ext_n(k)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Term::Node(*op, args))
            }
            Arity::Flattening => {
                let payload = map_leaves_raw(sig, &|l: &Leaf| bracket_boxed(sig, f, l, c), &args[0])?;
                Ok(Term::Node(*op, vec![payload]))
            }
        },
    }
}

fn bracket_boxed(sig: &Signature, f: &PointedMorphism, l: &Leaf, c: &Ctx) -> Result<Leaf> {
    match l {
        Leaf::Boxed(w) => Ok(Leaf::boxed(bracket_raw(sig, f, w, c)?)),
        other => Err(scope(format!("{other:?} in a flattening payload"))),
    }
}

/// The flattening clause evaluated as the literal composite
/// `τ ∘ H{f} ∘ θ`: insert the point of `Z` at `d = TmOver(Z c)`, bracket at
/// `d`, then bracket the boxed leaves at `c`. Agrees with [`bracket`] exactly
/// when `f` is pointed.
pub fn bracket_flat_unsimplified(sig: &Signature, f: &PointedMorphism, op: usize, u: &Term, c: &Ctx) -> Result<Term> {
    let d = f.z().on_ctx(c).tm_over();
    let moved = theta_flat(sig, f.z(), u, c)?;
    let inner = bracket_raw(sig, f, &moved, &d)?;
    let payload = map_leaves_raw(sig, &|l: &Leaf| bracket_boxed(sig, f, l, c), &inner)?;
    Ok(Term::Node(op, vec![payload]))
}

/// `τ ∘ H{f} ∘ θ` on a node payload over `Z(c)`, i.e. the right-hand side of
/// the bracket square for one constructor.
pub fn bracket_square_rhs(sig: &Signature, f: &PointedMorphism, op: usize, args: &[Term], c: &Ctx) -> Result<Term> {
    match sig.arity(op)? {
        Arity::Binding(ks) => {
            let moved = crate::signature::strength_binding(sig, ks, f.z(), args, c)?;
            let args = moved
                .iter()
                .zip(ks)
                .map(|(a, &k)| bracket(sig, f, a, &c.ext_n(k)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Term::Node(op, args))
        }
        Arity::Flattening => match args {
            [u] => bracket_flat_unsimplified(sig, f, op, u, c),
            _ => Err(scope(format!("flattening constructor {op} takes 1 argument"))),
        },
    }
}

/// Monad multiplication `{id}`: `t` over `TmOver(c)`, result over `c`.
pub fn mu(sig: &Signature, t: &Term, c: &Ctx) -> Result<Term> {
    bracket(sig, &PointedMorphism::identity_on(sig), t, c)
}

pub(crate) fn mu_raw(sig: &Signature, t: &Term, c: &Ctx) -> Result<Term> {
    bracket_raw(sig, &PointedMorphism::identity_on(sig), t, c)
}

/// A substitution rule `A -> T(B)` on a finite source context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstRule {
    source: Ctx,
    target: Ctx,
    assignment: HashMap<Leaf, Term>,
}

impl SubstRule {
    /// `terms[i]` is assigned to the variable numbered `i` of `source`.
    pub fn new(sig: &Signature, source: Ctx, target: Ctx, terms: Vec<Term>) -> Result<Self> {
        let leaves = source
            .leaves()
            .ok_or_else(|| scope(format!("substitution source {source} is not finite")))?;
        if leaves.len() != terms.len() {
            return Err(scope(format!("{} terms for {} variables of {source}", terms.len(), leaves.len())));
        }
        for t in &terms {
            if !validate(sig, &target, t) {
                return Err(scope(format!("assigned term is not scope-valid over {target}")));
            }
        }
        Ok(SubstRule { source, target, assignment: leaves.into_iter().zip(terms).collect() })
    }

    pub fn from_fn<F>(sig: &Signature, source: Ctx, target: Ctx, f: F) -> Result<Self>
    where
        F: Fn(&Leaf) -> Term,
    {
        let terms = source
            .leaves()
            .ok_or_else(|| scope(format!("substitution source {source} is not finite")))?
            .iter()
            .map(f)
            .collect();
        SubstRule::new(sig, source, target, terms)
    }

    /// `l ↦ Var(l)`.
    pub fn identity(c: &Ctx) -> Result<Self> {
        SubstRule::from_fn(&Signature::empty(), c.clone(), c.clone(), |l| Term::Var(l.clone()))
    }

    pub fn source(&self) -> &Ctx {
        &self.source
    }

    pub fn target(&self) -> &Ctx {
        &self.target
    }

    pub fn get(&self, l: &Leaf) -> Result<&Term> {
        self.assignment
            .get(l)
            .ok_or_else(|| scope(format!("{l:?} is not a variable of {}", self.source)))
    }
}

/// Parallel substitution `μ ∘ T(r)`.
pub fn subst(sig: &Signature, r: &SubstRule, t: &Term) -> Result<Term> {
    if !validate(sig, r.source(), t) {
        return Err(scope(format!("term is not scope-valid over {}", r.source())));
    }
    let boxed = map_leaves_raw(sig, &|l: &Leaf| Ok(Leaf::boxed(r.get(l)?.clone())), t)?;
    mu_raw(sig, &boxed, r.target())
}

/// Substitutes `u` for the fresh variable of `t` over `Ext(c)`.
pub fn subst1(sig: &Signature, t: &Term, u: &Term, c: &Ctx) -> Result<Term> {
    if !validate(sig, &c.ext(), t) || !validate(sig, c, u) {
        return Err(scope(format!("subst1 arguments are not scope-valid over {c}")));
    }
    let boxed = map_leaves_raw(
        sig,
        &|l: &Leaf| match l {
            Leaf::New => Ok(Leaf::boxed(u.clone())),
            Leaf::Old(x) => Ok(Leaf::boxed(Term::Var((**x).clone()))),
            other => Err(scope(format!("{other:?} is not a leaf of an extended context"))),
        },
        t,
    )?;
    mu_raw(sig, &boxed, c)
}

/// `Tm·Tm -> Tm` given by the multiplication.
pub fn join_tm(sig: &Signature) -> PointedTransform {
    let tm = PointedEndo::Tm(sig.clone());
    let s = sig.clone();
    PointedTransform::new("join", PointedEndo::compose(tm.clone(), tm.clone()), tm, move |c, l| match l {
        Leaf::Boxed(w) => Ok(Leaf::boxed(mu_raw(&s, w, c)?)),
        other => Err(scope(format!("{other:?} is not a boxed term"))),
    })
}

/// A smallest closed term of `sig`, if any.
pub fn minimal_closed(sig: &Signature) -> Option<Term> {
    gen::random_term(sig, &Ctx::Fin(0), 0, 0).ok()
}

/// The pointed morphisms the law suites range over: the identity on
/// `(T, η)`, `η` itself, and a constant on the fresh variable of `Ext`
/// (when the signature has a closed term).
pub fn shipped_morphisms(sig: &Signature) -> Vec<PointedMorphism> {
    let mut out = vec![PointedMorphism::identity_on(sig), PointedMorphism::eta()];
    if let Some(closed) = minimal_closed(sig) {
        out.push(PointedMorphism::const_closed(closed));
    }
    out
}

/// Pointed transformations into `z`, used for naturality of `{-}` in `f`.
pub fn shipped_transforms(z: &PointedEndo) -> Vec<PointedTransform> {
    let mut out = vec![PointedTransform::from_point(z)];
    match z {
        PointedEndo::Ext => out.push(PointedTransform::contract_ext()),
        PointedEndo::Tm(s) => {
            if let Some(closed) = minimal_closed(s) {
                out.push(PointedTransform::ext_into_tm(s, closed));
            }
            out.push(join_tm(s));
        }
        _ => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten::{self, app, flat, lam};
    use crate::term;

    fn var(l: Leaf) -> Term {
        Term::Var(l)
    }

    fn id0() -> Term {
        lam(var(Leaf::New))
    }

    #[test]
    fn identity_unboxes_a_variable() {
        let lc = flatten::lc();
        let u = app(Term::idx(0), id0());
        let t = var(Leaf::boxed(u.clone()));
        assert_eq!(bracket(&lc, &PointedMorphism::identity_on(&lc), &t, &Ctx::Fin(1)).unwrap(), u);
    }

    #[test]
    fn const_closed_replaces_the_fresh_variable() {
        let lc = flatten::lc();
        let f = PointedMorphism::const_closed(id0());
        let t = app(var(Leaf::New), var(Leaf::old(Leaf::Idx(0))));
        let out = bracket(&lc, &f, &t, &Ctx::Fin(1)).unwrap();
        assert_eq!(out, app(id0(), Term::idx(0)));
    }

    #[test]
    fn eta_is_the_identity_here() {
        let lce = flatten::lce();
        let t = lam(flat(app(
            var(Leaf::boxed(var(Leaf::old(Leaf::New)))),
            var(Leaf::boxed(var(Leaf::New))),
        )));
        let c = Ctx::Fin(0).ext();
        assert!(validate(&lce, &c, &t));
        assert_eq!(bracket(&lce, &PointedMorphism::eta(), &t, &c).unwrap(), t);
    }

    #[test]
    fn mu_examples() {
        let lc = flatten::lc();
        let c = Ctx::Fin(1);
        let u = app(Term::idx(0), Term::idx(0));
        assert_eq!(mu(&lc, &var(Leaf::boxed(u.clone())), &c).unwrap(), u);
        let wrapped = term::map_leaves(&lc, &crate::pointed::eta_wrap_map(&c), &u).unwrap();
        assert_eq!(mu(&lc, &wrapped, &c).unwrap(), u);
        let t = app(var(Leaf::boxed(id0())), var(Leaf::boxed(Term::idx(0))));
        assert_eq!(mu(&lc, &t, &c).unwrap(), app(id0(), Term::idx(0)));
    }

    #[test]
    fn mu_lifts_under_binders() {
        let lc = flatten::lc();
        // λ. (x0 0) with x0 boxed: the free variable moves under the binder
        let t = lam(app(var(Leaf::old(Leaf::boxed(Term::idx(0)))), var(Leaf::New)));
        let out = mu(&lc, &t, &Ctx::Fin(1)).unwrap();
        assert_eq!(out, lam(app(var(Leaf::old(Leaf::Idx(0))), var(Leaf::New))));
    }

    #[test]
    fn subst_examples() {
        let lc = flatten::lc();
        let c2 = Ctx::Fin(2);
        let t = app(Term::idx(0), Term::idx(1));
        let r = SubstRule::new(&lc, c2.clone(), c2.clone(), vec![id0(), Term::idx(1)]).unwrap();
        assert_eq!(subst(&lc, &r, &t).unwrap(), app(id0(), Term::idx(1)));
        assert_eq!(subst(&lc, &SubstRule::identity(&c2).unwrap(), &t).unwrap(), t);

        let c1 = Ctx::Fin(1);
        let t = lam(app(var(Leaf::old(Leaf::Idx(0))), var(Leaf::New)));
        let r = SubstRule::new(&lc, c1.clone(), c1, vec![id0()]).unwrap();
        assert_eq!(subst(&lc, &r, &t).unwrap(), lam(app(id0(), var(Leaf::New))));
    }

    #[test]
    fn subst_rejects_bad_rules_and_terms() {
        let lc = flatten::lc();
        assert!(SubstRule::new(&lc, Ctx::Fin(1), Ctx::Fin(0), vec![Term::idx(0)]).is_err());
        assert!(SubstRule::new(&lc, Ctx::Fin(2), Ctx::Fin(2), vec![Term::idx(0)]).is_err());
        assert!(SubstRule::identity(&Ctx::Fin(0).tm_over()).is_err());
        let r = SubstRule::identity(&Ctx::Fin(1)).unwrap();
        assert!(subst(&lc, &r, &Term::idx(1)).is_err());
    }

    #[test]
    fn subst1_examples() {
        let lc = flatten::lc();
        let c = Ctx::Fin(1);
        let u = id0();
        assert_eq!(subst1(&lc, &var(Leaf::New), &u, &c).unwrap(), u);
        assert_eq!(subst1(&lc, &var(Leaf::old(Leaf::Idx(0))), &u, &c).unwrap(), Term::idx(0));
        let t = app(var(Leaf::New), var(Leaf::New));
        assert_eq!(subst1(&lc, &t, &u, &Ctx::Fin(0)).unwrap(), app(id0(), id0()));
    }

    #[test]
    fn flat_clause_matches_the_composite() {
        let lce = flatten::lce();
        let f = PointedMorphism::identity_on(&lce);
        let c = Ctx::Fin(1);
        // payload over TmOver(TmOver(Fin 1))
        let inner = var(Leaf::boxed(app(var(Leaf::boxed(Term::idx(0))), var(Leaf::boxed(id0())))));
        let u = app(inner, var(Leaf::boxed(var(Leaf::boxed(Term::idx(0))))));
        let t = flat(u.clone());
        let direct = bracket(&lce, &f, &t, &c).unwrap();
        assert_eq!(direct, bracket_flat_unsimplified(&lce, &f, flatten::FLAT, &u, &c).unwrap());
    }

    #[test]
    fn bracket_rejects_ill_scoped_input() {
        let lc = flatten::lc();
        let f = PointedMorphism::identity_on(&lc);
        assert!(bracket(&lc, &f, &Term::idx(0), &Ctx::Fin(1)).is_err());
    }

    #[test]
    fn join_is_pointed() {
        let lc = flatten::lc();
        let j = join_tm(&lc);
        let c = Ctx::Fin(1);
        let e = j.source().point(&c);
        let back = j.at(&c).apply(&e.apply(&Leaf::Idx(0)).unwrap()).unwrap();
        assert_eq!(back, PointedEndo::Tm(lc).point(&c).apply(&Leaf::Idx(0)).unwrap());
    }
}
