//! A textbook de Bruijn evaluator used as an independent reference.
//!
//! Terms are converted to plain index terms (`OTerm`) where a flattening node
//! is an explicit `(outer, environment)` pair, and everything is done with
//! shift/substitute index arithmetic. Nothing here calls the bracket, the
//! leaf-map machinery or the strengths.

use std::cell::RefCell;

use crate::ctx::{Ctx, Leaf};
use crate::error::{scope, Error, Result};
use crate::signature::{Arity, Signature};
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OTerm {
    Var(usize),
    /// Constructor id and arguments; binder counts come from the signature.
    Node(usize, Vec<OTerm>),
    /// `outer` is closed apart from indices that point into `env`; the
    /// entries of `env` live in the enclosing scope.
    Flat(Box<OTerm>, Vec<OTerm>),
}

fn binders(sig: &Signature, op: usize) -> Result<Vec<usize>> {
    match sig.arity(op)? {
        Arity::Binding(ks) => Ok(ks.clone()),
        Arity::Flattening => Err(Error::Unsupported("flattening as an ordinary node".into())),
    }
}

/// Adds `by` to every index `>= cutoff`.
pub fn shift(sig: &Signature, t: &OTerm, by: usize, cutoff: usize) -> Result<OTerm> {
    Ok(match t {
        OTerm::Var(i) if *i >= cutoff => OTerm::Var(i + by),
        OTerm::Var(i) => OTerm::Var(*i),
        OTerm::Node(op, args) => {
            let ks = binders(sig, *op)?;
            let args = args
                .iter()
                .zip(&ks)
                .map(|(a, k)| shift(sig, a, by, cutoff + k))
                .collect::<Result<Vec<_>>>()?;
            OTerm::Node(*op, args)
        }
        // free indices of the outer skeleton refer to env, not to the scope
        OTerm::Flat(outer, env) => OTerm::Flat(
            outer.clone(),
            env.iter().map(|e| shift(sig, e, by, cutoff)).collect::<Result<Vec<_>>>()?,
        ),
    })
}

/// Replaces every free index `depth + i` by `sigma[i]` shifted by `depth`.
pub fn subst_at(sig: &Signature, t: &OTerm, depth: usize, sigma: &[OTerm]) -> Result<OTerm> {
    Ok(match t {
        OTerm::Var(i) if *i < depth => OTerm::Var(*i),
        OTerm::Var(i) => {
            let s = sigma
                .get(i - depth)
                .ok_or_else(|| scope(format!("index {} not covered by the substitution", i - depth)))?;
            shift(sig, s, depth, 0)?
        }
        OTerm::Node(op, args) => {
            let ks = binders(sig, *op)?;
            let args = args
                .iter()
                .zip(&ks)
                .map(|(a, k)| subst_at(sig, a, depth + k, sigma))
                .collect::<Result<Vec<_>>>()?;
            OTerm::Node(*op, args)
        }
        OTerm::Flat(outer, env) => OTerm::Flat(
            outer.clone(),
            env.iter().map(|e| subst_at(sig, e, depth, sigma)).collect::<Result<Vec<_>>>()?,
        ),
    })
}

/// Resolves every flattening node by substituting its environment into its
/// outer skeleton, innermost first.
pub fn flatten_oterm(sig: &Signature, t: &OTerm) -> Result<OTerm> {
    Ok(match t {
        OTerm::Var(i) => OTerm::Var(*i),
        OTerm::Node(op, args) => OTerm::Node(
            *op,
            args.iter().map(|a| flatten_oterm(sig, a)).collect::<Result<Vec<_>>>()?,
        ),
        OTerm::Flat(outer, env) => {
            let env = env.iter().map(|e| flatten_oterm(sig, e)).collect::<Result<Vec<_>>>()?;
            subst_at(sig, &flatten_oterm(sig, outer)?, 0, &env)?
        }
    })
}

/// Scope of a flattening payload during conversion: boxed leaves are
/// appended to `env`; they are converted in the parent scope at the binder
/// depth where the flattening node sits.
struct Scope<'a> {
    parent: Option<(&'a Scope<'a>, usize)>,
    base: &'a [Leaf],
    env: RefCell<Vec<OTerm>>,
}

fn strip(l: &Leaf, depth: usize) -> std::result::Result<usize, &Leaf> {
    let mut cur = l;
    for j in 0..depth {
        match cur {
            Leaf::New => return Ok(j),
            Leaf::Old(x) => cur = x,
            _ => return Err(cur),
        }
    }
    Err(cur)
}

fn leaf_to_o(sig: &Signature, l: &Leaf, depth: usize, sc: &Scope<'_>) -> Result<OTerm> {
    let rest = match strip(l, depth) {
        Ok(j) => return Ok(OTerm::Var(j)),
        Err(rest) => rest,
    };
    match sc.parent {
        None => {
            let pos = sc
                .base
                .iter()
                .position(|b| b == rest)
                .ok_or_else(|| scope(format!("{rest:?} is not a base variable")))?;
            Ok(OTerm::Var(depth + pos))
        }
        Some((parent, parent_depth)) => match rest {
            Leaf::Boxed(w) => {
                let o = to_o(sig, w, parent_depth, parent)?;
                let mut env = sc.env.borrow_mut();
                env.push(o);
                Ok(OTerm::Var(depth + env.len() - 1))
            }
            other => Err(scope(format!("{other:?} inside a flattening payload"))),
        },
    }
}

fn to_o(sig: &Signature, t: &Term, depth: usize, sc: &Scope<'_>) -> Result<OTerm> {
    match t {
        Term::Var(l) => leaf_to_o(sig, l, depth, sc),
        Term::Node(op, args) => match sig.arity(*op)? {
            Arity::Binding(ks) => Ok(OTerm::Node(
                *op,
                args.iter()
                    .zip(ks)
                    .map(|(a, k)| to_o(sig, a, depth + k, sc))
                    .collect::<Result<Vec<_>>>()?,
            )),
            Arity::Flattening => {
                let inner = Scope { parent: Some((sc, depth)), base: &[], env: RefCell::new(Vec::new()) };
                let outer = to_o(sig, &args[0], 0, &inner)?;
                Ok(OTerm::Flat(Box::new(outer), inner.env.into_inner()))
            }
        },
    }
}

/// Converts a term over `Ext^k(Fin n)`. A term over `TmOver(c)` is treated
/// as the payload of a flattening node over `c`.
pub fn to_oterm(sig: &Signature, t: &Term, c: &Ctx) -> Result<OTerm> {
    match c {
        Ctx::TmOver(inner) => {
            let base = inner.leaves().ok_or_else(|| scope(format!("{inner} is not finite")))?;
            let root = Scope { parent: None, base: &base, env: RefCell::new(Vec::new()) };
            let payload = Scope { parent: Some((&root, 0)), base: &[], env: RefCell::new(Vec::new()) };
            let outer = to_o(sig, t, 0, &payload)?;
            Ok(OTerm::Flat(Box::new(outer), payload.env.into_inner()))
        }
        _ => {
            let base = c.leaves().ok_or_else(|| scope(format!("{c} is not finite")))?;
            let root = Scope { parent: None, base: &base, env: RefCell::new(Vec::new()) };
            to_o(sig, t, 0, &root)
        }
    }
}

/// Converts back to a term over the finite context `c`; fails on
/// flattening nodes.
pub fn from_oterm(sig: &Signature, t: &OTerm, c: &Ctx) -> Result<Term> {
    let base = c.leaves().ok_or_else(|| scope(format!("{c} is not finite")))?;
    from_o(sig, t, 0, &base)
}

fn from_o(sig: &Signature, t: &OTerm, depth: usize, base: &[Leaf]) -> Result<Term> {
    match t {
        OTerm::Var(i) if *i < depth => Ok(Term::Var(Leaf::old_n(*i, Leaf::New))),
        OTerm::Var(i) => {
            let b = base
                .get(i - depth)
                .ok_or_else(|| scope(format!("free index {} out of range", i - depth)))?;
            Ok(Term::Var(Leaf::old_n(depth, b.clone())))
        }
        OTerm::Node(op, args) => {
            let ks = binders(sig, *op)?;
            Ok(Term::Node(
                *op,
                args.iter()
                    .zip(&ks)
                    .map(|(a, k)| from_o(sig, a, depth + k, base))
                    .collect::<Result<Vec<_>>>()?,
            ))
        }
        OTerm::Flat(..) => Err(Error::Unsupported("flattening node in oracle output".into())),
    }
}

/// Flattening by shift-based substitution. The output uses the binding
/// constructors of `sig` with the same ids.
pub fn naive_flatten(sig: &Signature, t: &Term, c: &Ctx) -> Result<Term> {
    let o = to_oterm(sig, t, c)?;
    from_oterm(sig, &flatten_oterm(sig, &o)?, c)
}

/// Parallel substitution `t[i := sigma[i]]` for `t` over `Fin(n)`, terms of
/// `sigma` over `target`.
pub fn naive_subst(sig: &Signature, t: &Term, n: usize, sigma: &[Term], target: &Ctx) -> Result<Term> {
    let o = to_oterm(sig, t, &Ctx::Fin(n))?;
    let sigma = sigma.iter().map(|s| to_oterm(sig, s, target)).collect::<Result<Vec<_>>>()?;
    from_oterm(sig, &subst_at(sig, &o, 0, &sigma)?, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten::{self, app, flat, lam};

    fn o_lam(b: OTerm) -> OTerm {
        OTerm::Node(1, vec![b])
    }

    fn o_app(a: OTerm, b: OTerm) -> OTerm {
        OTerm::Node(0, vec![a, b])
    }

    #[test]
    fn shift_respects_binders() {
        let lc = flatten::lc();
        let t = o_lam(o_app(OTerm::Var(0), OTerm::Var(1)));
        assert_eq!(shift(&lc, &t, 2, 0).unwrap(), o_lam(o_app(OTerm::Var(0), OTerm::Var(3))));
    }

    #[test]
    fn flat_with_shift_under_binder() {
        // flat{ (0 0) | λ.(0 1) } over Fin(1)
        let lce = flatten::lce();
        let env = o_lam(o_app(OTerm::Var(0), OTerm::Var(1)));
        let t = OTerm::Flat(Box::new(o_app(OTerm::Var(0), OTerm::Var(0))), vec![env.clone()]);
        assert_eq!(flatten_oterm(&lce, &t).unwrap(), o_app(env.clone(), env));
        // the same through a binder of the outer skeleton: flat{ λ.(1 0) | 0 }
        let t = OTerm::Flat(Box::new(o_lam(o_app(OTerm::Var(1), OTerm::Var(0)))), vec![OTerm::Var(0)]);
        assert_eq!(flatten_oterm(&lce, &t).unwrap(), o_lam(o_app(OTerm::Var(1), OTerm::Var(0))));
    }

    #[test]
    fn conversion_round_trip_on_plain_terms() {
        let lc = flatten::lc();
        let c = Ctx::Fin(2).ext();
        let t = lam(app(Term::Var(Leaf::old(Leaf::New)), Term::Var(Leaf::old_n(2, Leaf::Idx(1)))));
        let o = to_oterm(&lc, &t, &c).unwrap();
        assert_eq!(o, o_lam(o_app(OTerm::Var(1), OTerm::Var(3))));
        assert_eq!(from_oterm(&lc, &o, &c).unwrap(), t);
    }

    #[test]
    fn naive_flatten_examples() {
        let lce = flatten::lce();
        let id = lam(Term::Var(Leaf::New));
        let t = flat(Term::Var(Leaf::boxed(id.clone())));
        assert_eq!(naive_flatten(&lce, &t, &Ctx::Fin(0)).unwrap(), id);
        let t = flat(app(Term::Var(Leaf::boxed(id.clone())), Term::Var(Leaf::boxed(Term::idx(0)))));
        assert_eq!(naive_flatten(&lce, &t, &Ctx::Fin(1)).unwrap(), app(id, Term::idx(0)));
    }

    #[test]
    fn naive_subst_example() {
        let lc = flatten::lc();
        let id = lam(Term::Var(Leaf::New));
        let t = lam(app(Term::Var(Leaf::old(Leaf::Idx(0))), Term::Var(Leaf::New)));
        let out = naive_subst(&lc, &t, 1, std::slice::from_ref(&id), &Ctx::Fin(1)).unwrap();
        assert_eq!(out, lam(app(id, Term::Var(Leaf::New))));
    }
}
