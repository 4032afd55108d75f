//! Leaf domains ("contexts"), their inhabitants, and maps between them.
//!
//! A [`Ctx`] describes a variable supply: a finite block of de Bruijn
//! indices, the extension of a supply by one fresh variable, or the supply
//! whose elements are terms over an inner supply. Every supply that the
//! substitution machinery touches is generated from these three formers, so
//! every value stays finitely representable.

use std::fmt;
use std::sync::Arc;

use crate::error::{scope, Error, Result};
use crate::signature::Signature;
use crate::term::{self, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ctx {
    /// `n` free de Bruijn indices `0..n`.
    Fin(usize),
    /// The inner context plus one distinguished fresh variable.
    Ext(Box<Ctx>),
    /// Terms over the inner context, used as variables.
    TmOver(Box<Ctx>),
}

impl Ctx {
    pub fn ext(&self) -> Ctx {
        Ctx::Ext(Box::new(self.clone()))
    }

    pub fn ext_n(&self, k: usize) -> Ctx {
        (0..k).fold(self.clone(), |c, _| c.ext())
    }

    pub fn tm_over(&self) -> Ctx {
        Ctx::TmOver(Box::new(self.clone()))
    }

    /// Number of `TmOver` layers anywhere in the descriptor.
    pub fn tm_depth(&self) -> usize {
        match self {
            Ctx::Fin(_) => 0,
            Ctx::Ext(c) => c.tm_depth(),
            Ctx::TmOver(c) => 1 + c.tm_depth(),
        }
    }

    /// For `Ext^k(Fin(n))` returns `(k, n)`.
    pub fn fin_rooted(&self) -> Option<(usize, usize)> {
        match self {
            Ctx::Fin(n) => Some((0, *n)),
            Ctx::Ext(c) => c.fin_rooted().map(|(k, n)| (k + 1, n)),
            Ctx::TmOver(_) => None,
        }
    }

    /// All leaves of a finite (Fin-rooted) context, in de Bruijn order:
    /// the i-th entry is the variable numbered `i`.
    pub fn leaves(&self) -> Option<Vec<Leaf>> {
        match self {
            Ctx::Fin(n) => Some((0..*n).map(Leaf::Idx).collect()),
            Ctx::Ext(c) => {
                let mut out = vec![Leaf::New];
                out.extend(c.leaves()?.into_iter().map(Leaf::old));
                Some(out)
            }
            Ctx::TmOver(_) => None,
        }
    }
}

impl fmt::Display for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ctx::Fin(n) => write!(f, "Fin({n})"),
            Ctx::Ext(c) => write!(f, "Ext({c})"),
            Ctx::TmOver(c) => write!(f, "TmOver({c})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Leaf {
    Idx(usize),
    New,
    Old(Box<Leaf>),
    Boxed(Box<Term>),
}

impl Leaf {
    pub fn old(l: Leaf) -> Leaf {
        Leaf::Old(Box::new(l))
    }

    pub fn old_n(k: usize, l: Leaf) -> Leaf {
        (0..k).fold(l, |l, _| Leaf::old(l))
    }

    pub fn boxed(t: Term) -> Leaf {
        Leaf::Boxed(Box::new(t))
    }

    /// Size contribution of the leaf: contents of boxed terms.
    pub fn content_size(&self) -> usize {
        match self {
            Leaf::Idx(_) | Leaf::New => 0,
            Leaf::Old(l) => l.content_size(),
            Leaf::Boxed(t) => t.size(),
        }
    }

    pub(crate) fn content_nodes(&self) -> usize {
        match self {
            Leaf::Idx(_) | Leaf::New => 0,
            Leaf::Old(l) => l.content_nodes(),
            Leaf::Boxed(t) => t.node_count(),
        }
    }
}

/// Well-formedness of a leaf relative to a context; boxed terms are
/// validated against `sig`.
pub fn leaf_is_wf(l: &Leaf, c: &Ctx, sig: &Signature) -> bool {
    match (l, c) {
        (Leaf::Idx(i), Ctx::Fin(n)) => i < n,
        (Leaf::New, Ctx::Ext(_)) => true,
        (Leaf::Old(l), Ctx::Ext(c)) => leaf_is_wf(l, c, sig),
        (Leaf::Boxed(t), Ctx::TmOver(c)) => term::validate(sig, c, t),
        _ => false,
    }
}

pub type LeafFn = dyn Fn(&Leaf) -> Result<Leaf> + Send + Sync;

/// A map between leaf domains with declared endpoints.
#[derive(Clone)]
pub struct LeafMap {
    source: Ctx,
    target: Ctx,
    apply: Arc<LeafFn>,
}

impl fmt::Debug for LeafMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LeafMap({} -> {})", self.source, self.target)
    }
}

impl LeafMap {
    pub fn new<F>(source: Ctx, target: Ctx, f: F) -> Self
    where
        F: Fn(&Leaf) -> Result<Leaf> + Send + Sync + 'static,
    {
        LeafMap { source, target, apply: Arc::new(f) }
    }

    pub fn source(&self) -> &Ctx {
        &self.source
    }

    pub fn target(&self) -> &Ctx {
        &self.target
    }

    pub fn apply(&self, l: &Leaf) -> Result<Leaf> {
        (self.apply)(l)
    }

    pub fn identity(c: &Ctx) -> Self {
        LeafMap::new(c.clone(), c.clone(), |l| Ok(l.clone()))
    }

    pub fn weaken(c: &Ctx) -> Self {
        LeafMap::new(c.clone(), c.ext(), |l| Ok(Leaf::old(l.clone())))
    }

    /// A renaming `Fin(n) -> Fin(m)` given by its table.
    pub fn tabulated(n: usize, m: usize, table: Vec<usize>) -> Result<Self> {
        if table.len() != n || table.iter().any(|&j| j >= m) {
            return Err(scope(format!("table {table:?} is not a map Fin({n}) -> Fin({m})")));
        }
        Ok(LeafMap::new(Ctx::Fin(n), Ctx::Fin(m), move |l| match l {
            Leaf::Idx(i) if *i < table.len() => Ok(Leaf::Idx(table[*i])),
            other => Err(scope(format!("{other:?} is not a leaf of Fin({n})"))),
        }))
    }

    /// `self ∘ h`.
    pub fn after(&self, h: &LeafMap) -> Result<Self> {
        compose_map(self, h)
    }

    /// The action of context extension: `Ext(source) -> Ext(target)`,
    /// fixing the fresh variable.
    pub fn lift_ext(&self) -> Self {
        let g = self.apply.clone();
        LeafMap::new(self.source.ext(), self.target.ext(), move |l| match l {
            Leaf::New => Ok(Leaf::New),
            Leaf::Old(x) => Ok(Leaf::old(g(x)?)),
            other => Err(scope(format!("{other:?} is not a leaf of an extended context"))),
        })
    }

    pub fn lift_ext_n(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |g, _| g.lift_ext())
    }

    /// The action of the term functor: `TmOver(source) -> TmOver(target)`,
    /// renaming inside boxed terms.
    pub fn lift_tm(&self, sig: &Signature) -> Self {
        let g = self.apply.clone();
        let sig = sig.clone();
        LeafMap::new(self.source.tm_over(), self.target.tm_over(), move |l| match l {
            Leaf::Boxed(t) => Ok(Leaf::boxed(term::map_leaves_raw(&sig, &*g, t)?)),
            other => Err(scope(format!("{other:?} is not a boxed term"))),
        })
    }
}

pub fn id_map(c: &Ctx) -> LeafMap {
    LeafMap::identity(c)
}

/// `g ∘ h`; fails unless `h.target == g.source`.
pub fn compose_map(g: &LeafMap, h: &LeafMap) -> Result<LeafMap> {
    if h.target != g.source {
        return Err(Error::ContextMismatch { expected: g.source.clone(), found: h.target.clone() });
    }
    let (ga, ha) = (g.apply.clone(), h.apply.clone());
    Ok(LeafMap {
        source: h.source.clone(),
        target: g.target.clone(),
        apply: Arc::new(move |l| ga(&ha(l)?)),
    })
}

pub fn weaken_map(c: &Ctx) -> LeafMap {
    LeafMap::weaken(c)
}
