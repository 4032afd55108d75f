//! Well-scoped terms over a signature and their functorial action on leaves.
//!
//! A `Term` is an element of the initial `(Id + H)`-algebra: `Var` is the
//! variable inclusion and `Node` the constructor part. Scoping is not in the
//! type; `validate` checks it against a context and a signature.

use crate::ctx::{leaf_is_wf, Ctx, Leaf, LeafMap};
use crate::error::{scope, Result};
use crate::signature::{Arity, Signature};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Leaf),
    /// Constructor `op` of the ambient signature. For `Binding(ks)` there is
    /// one argument per entry of `ks`, argument `i` living over
    /// `Ext^{ks[i]}(c)`; for `Flattening` there is one argument over
    /// `TmOver(c)`.
    Node(usize, Vec<Term>),
}

impl Term {
    pub fn idx(i: usize) -> Term {
        Term::Var(Leaf::Idx(i))
    }

    pub fn node(op: usize, args: Vec<Term>) -> Term {
        Term::Node(op, args)
    }

    /// Node count including variable leaves and the contents of boxed
    /// leaves.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(l) => 1 + l.content_size(),
            Term::Node(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Number of constructor nodes, boxed contents included.
    pub fn node_count(&self) -> usize {
        match self {
            Term::Var(l) => l.content_nodes(),
            Term::Node(_, args) => 1 + args.iter().map(Term::node_count).sum::<usize>(),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

pub fn term_eq(t: &Term, u: &Term) -> bool {
    t == u
}

pub fn size(t: &Term) -> usize {
    t.size()
}

/// Scope frames met while descending into a term. Boxed leaves at a `Tm`
/// frame (introduced by a flattening node) belong to the term signature;
/// boxed leaves inside the base context belong to the base signature.
enum Frame<'a> {
    Base(&'a Ctx, &'a Signature),
    Ext(&'a Frame<'a>),
    Tm(&'a Frame<'a>),
}

fn leaf_fits(sig: &Signature, l: &Leaf, frame: &Frame<'_>) -> bool {
    match frame {
        Frame::Base(c, base_sig) => leaf_is_wf(l, c, base_sig),
        Frame::Ext(inner) => match l {
            Leaf::New => true,
            Leaf::Old(x) => leaf_fits(sig, x, inner),
            _ => false,
        },
        Frame::Tm(inner) => match l {
            Leaf::Boxed(u) => term_fits(sig, u, inner),
            _ => false,
        },
    }
}

fn term_fits(sig: &Signature, t: &Term, frame: &Frame<'_>) -> bool {
    match t {
        Term::Var(l) => leaf_fits(sig, l, frame),
        Term::Node(op, args) => match sig.arity(*op) {
            Err(_) => false,
            Ok(Arity::Binding(ks)) => {
                ks.len() == args.len()
                    && args.iter().zip(ks).all(|(a, &k)| fits_under(sig, a, frame, k))
            }
            Ok(Arity::Flattening) => args.len() == 1 && term_fits(sig, &args[0], &Frame::Tm(frame)),
        },
    }
}

fn fits_under(sig: &Signature, t: &Term, frame: &Frame<'_>, k: usize) -> bool {
    if k == 0 {
        term_fits(sig, t, frame)
    } else {
        fits_under(sig, t, &Frame::Ext(frame), k - 1)
    }
}

/// Scope-validity of `t` over `c` relative to `sig`.
pub fn validate(sig: &Signature, c: &Ctx, t: &Term) -> bool {
    term_fits(sig, t, &Frame::Base(c, sig))
}

/// Like [`validate`], but boxed leaves that belong to `c` itself are
/// checked against `ctx_sig`. Needed when a term of one signature has
/// variables that are terms of another.
pub fn validate_mixed(sig: &Signature, ctx_sig: &Signature, c: &Ctx, t: &Term) -> bool {
    term_fits(sig, t, &Frame::Base(c, ctx_sig))
}

/// Lifts met while descending: the leaf function applies at `Base`.
enum Lift<'a> {
    Base,
    Ext(&'a Lift<'a>),
    Tm(&'a Lift<'a>),
}

type LeafFn<'f> = dyn Fn(&Leaf) -> Result<Leaf> + 'f;

fn map_leaf(sig: &Signature, f: &LeafFn<'_>, l: &Leaf, lift: &Lift<'_>) -> Result<Leaf> {
    match lift {
        Lift::Base => f(l),
        Lift::Ext(inner) => match l {
            Leaf::New => Ok(Leaf::New),
            Leaf::Old(x) => Ok(Leaf::old(map_leaf(sig, f, x, inner)?)),
            other => Err(scope(format!("{other:?} under a binder"))),
        },
        Lift::Tm(inner) => match l {
            Leaf::Boxed(u) => Ok(Leaf::boxed(map_term(sig, f, u, inner)?)),
            other => Err(scope(format!("{other:?} inside a flattening payload"))),
        },
    }
}

fn map_term(sig: &Signature, f: &LeafFn<'_>, t: &Term, lift: &Lift<'_>) -> Result<Term> {
    match t {
        Term::Var(l) => Ok(Term::Var(map_leaf(sig, f, l, lift)?)),
        Term::Node(op, args) => {
            let mapped = match sig.arity(*op)? {
                Arity::Binding(ks) => {
                    if ks.len() != args.len() {
                        return Err(scope(format!("constructor {op} takes {} arguments", ks.len())));
                    }
                    args.iter()
                        .zip(ks)
                        .map(|(a, &k)| map_under(sig, f, a, lift, k))
                        .collect::<Result<Vec<_>>>()?
                }
                Arity::Flattening => {
                    if args.len() != 1 {
                        return Err(scope(format!("flattening constructor {op} takes 1 argument")));
                    }
                    vec![map_term(sig, f, &args[0], &Lift::Tm(lift))?]
                }
            };
            Ok(Term::Node(*op, mapped))
        }
    }
}

fn map_under(sig: &Signature, f: &LeafFn<'_>, t: &Term, lift: &Lift<'_>, k: usize) -> Result<Term> {
    if k == 0 {
        map_term(sig, f, t, lift)
    } else {
        map_under(sig, f, t, &Lift::Ext(lift), k - 1)
    }
}

/// Functorial action without a scope check: `f` is applied to every leaf of
/// the base context, lifted through binders and flattening payloads.
pub fn map_leaves_raw(sig: &Signature, f: &LeafFn<'_>, t: &Term) -> Result<Term> {
    map_term(sig, f, t, &Lift::Base)
}

/// Functorial action of the term functor on a leaf map.
pub fn map_leaves(sig: &Signature, g: &LeafMap, t: &Term) -> Result<Term> {
    if !validate(sig, g.source(), t) {
        return Err(scope(format!("term is not scope-valid over {}", g.source())));
    }
    map_leaves_raw(sig, &|l: &Leaf| g.apply(l), t)
}

/// Calls `visit` on every leaf of the base context in preorder.
pub fn for_each_base_leaf(sig: &Signature, t: &Term, visit: &mut dyn FnMut(&Leaf)) -> Result<()> {
    let mut err = None;
    collect(sig, t, &Lift::Base, visit, &mut err);
    err.map_or(Ok(()), Err)
}

fn collect(
    sig: &Signature,
    t: &Term,
    lift: &Lift<'_>,
    visit: &mut dyn FnMut(&Leaf),
    err: &mut Option<crate::error::Error>,
) {
    match t {
        Term::Var(l) => collect_leaf(sig, l, lift, visit, err),
        Term::Node(op, args) => match sig.arity(*op) {
            Err(e) => *err = Some(e),
            Ok(Arity::Binding(ks)) => {
                for (a, &k) in args.iter().zip(ks) {
                    collect_under(sig, a, lift, k, visit, err);
                }
            }
            Ok(Arity::Flattening) => {
                if let Some(u) = args.first() {
                    collect(sig, u, &Lift::Tm(lift), visit, err);
                }
            }
        },
    }
}

fn collect_under(
    sig: &Signature,
    t: &Term,
    lift: &Lift<'_>,
    k: usize,
    visit: &mut dyn FnMut(&Leaf),
    err: &mut Option<crate::error::Error>,
) {
    if k == 0 {
        collect(sig, t, lift, visit, err)
    } else {
        collect_under(sig, t, &Lift::Ext(lift), k - 1, visit, err)
    }
}

fn collect_leaf(
    sig: &Signature,
    l: &Leaf,
    lift: &Lift<'_>,
    visit: &mut dyn FnMut(&Leaf),
    err: &mut Option<crate::error::Error>,
) {
    match (lift, l) {
        (Lift::Base, _) => visit(l),
        (Lift::Ext(_), Leaf::New) => {}
        (Lift::Ext(inner), Leaf::Old(x)) => collect_leaf(sig, x, inner, visit, err),
        (Lift::Tm(inner), Leaf::Boxed(u)) => collect(sig, u, inner, visit, err),
        _ => *err = Some(scope(format!("{l:?} does not fit its position"))),
    }
}
