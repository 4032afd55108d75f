//! Pointed endofunctors on leaf domains and pointed morphisms into the term
//! functor.
//!
//! The monoidal structure is strict here: `Compose(Z', Z)` acts on a context
//! as `Z'` after `Z`, literally, so no coherence isomorphisms appear.

use std::fmt;
use std::sync::Arc;

use crate::ctx::{compose_map, weaken_map, Ctx, Leaf, LeafMap};
use crate::error::{scope, Result};
use crate::signature::Signature;
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointedEndo {
    /// Identity, pointed by the identity.
    Id,
    /// Context extension `1 + -`, pointed by weakening.
    Ext,
    /// The term functor of a signature, pointed by variable inclusion.
    Tm(Signature),
    /// `Compose(outer, inner)` is `outer · inner`.
    Compose(Box<PointedEndo>, Box<PointedEndo>),
}

impl PointedEndo {
    pub fn compose(outer: PointedEndo, inner: PointedEndo) -> Self {
        PointedEndo::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn on_ctx(&self, c: &Ctx) -> Ctx {
        match self {
            PointedEndo::Id => c.clone(),
            PointedEndo::Ext => c.ext(),
            PointedEndo::Tm(_) => c.tm_over(),
            PointedEndo::Compose(outer, inner) => outer.on_ctx(&inner.on_ctx(c)),
        }
    }

    pub fn on_map(&self, g: &LeafMap) -> LeafMap {
        match self {
            PointedEndo::Id => g.clone(),
            PointedEndo::Ext => g.lift_ext(),
            PointedEndo::Tm(sig) => g.lift_tm(sig),
            PointedEndo::Compose(outer, inner) => outer.on_map(&inner.on_map(g)),
        }
    }

    pub fn point(&self, c: &Ctx) -> LeafMap {
        match self {
            PointedEndo::Id => LeafMap::identity(c),
            PointedEndo::Ext => weaken_map(c),
            PointedEndo::Tm(_) => eta_wrap_map(c),
            PointedEndo::Compose(outer, inner) => {
                let inner_point = inner.point(c);
                let outer_point = outer.point(&inner.on_ctx(c));
                compose_map(&outer_point, &inner_point).expect("point endpoints agree")
            }
        }
    }

    /// The signature boxed leaves of `on_ctx(c)` are drawn from, if any.
    pub fn term_signature(&self) -> Option<&Signature> {
        match self {
            PointedEndo::Id | PointedEndo::Ext => None,
            PointedEndo::Tm(sig) => Some(sig),
            PointedEndo::Compose(outer, inner) => {
                outer.term_signature().or_else(|| inner.term_signature())
            }
        }
    }
}

impl fmt::Display for PointedEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointedEndo::Id => f.write_str("Id"),
            PointedEndo::Ext => f.write_str("Ext"),
            PointedEndo::Tm(_) => f.write_str("Tm"),
            PointedEndo::Compose(o, i) => write!(f, "{o}·{i}"),
        }
    }
}

/// `η` as a leaf map `c -> TmOver(c)`.
pub fn eta_wrap_map(c: &Ctx) -> LeafMap {
    LeafMap::new(c.clone(), c.tm_over(), |l| Ok(Leaf::boxed(Term::Var(l.clone()))))
}

/// The `k`-fold binder distribution `Ext^k(Z c) -> Z(Ext^k c)`.
///
/// One step sends the fresh variable to the point of `Z` at `Ext(c)` and an
/// old leaf along `Z` applied to weakening.
pub fn dist_map(z: &PointedEndo, c: &Ctx, k: usize) -> LeafMap {
    if k == 0 {
        return LeafMap::identity(&z.on_ctx(c));
    }
    let below = dist_map(z, c, k - 1).lift_ext();
    let step = dist_step(z, &c.ext_n(k - 1));
    compose_map(&step, &below).expect("dist endpoints agree")
}

fn dist_step(z: &PointedEndo, c: &Ctx) -> LeafMap {
    let fresh = z.point(&c.ext());
    let weaken = z.on_map(&weaken_map(c));
    LeafMap::new(z.on_ctx(c).ext(), z.on_ctx(&c.ext()), move |l| match l {
        Leaf::New => fresh.apply(&Leaf::New),
        Leaf::Old(x) => weaken.apply(x),
        other => Err(scope(format!("{other:?} is not a leaf of an extended context"))),
    })
}

pub type ComponentFn = dyn Fn(&Ctx, &Leaf) -> Result<Term> + Send + Sync;

/// A morphism of pointed endofunctors `(Z, e) -> (T, η)`, given by its
/// components `Z(c) -> T(c)`.
///
/// Pointedness and naturality are obligations of whoever builds one; see
/// [`crate::laws::check_pointed_morphism`].
#[derive(Clone)]
pub struct PointedMorphism {
    name: String,
    z: PointedEndo,
    component: Arc<ComponentFn>,
}

impl fmt::Debug for PointedMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointedMorphism({} : {} -> T)", self.name, self.z)
    }
}

impl PointedMorphism {
    pub fn new<F>(name: impl Into<String>, z: PointedEndo, component: F) -> Self
    where
        F: Fn(&Ctx, &Leaf) -> Result<Term> + Send + Sync + 'static,
    {
        PointedMorphism { name: name.into(), z, component: Arc::new(component) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn z(&self) -> &PointedEndo {
        &self.z
    }

    pub fn component(&self, c: &Ctx, l: &Leaf) -> Result<Term> {
        (self.component)(c, l)
    }

    /// The identity on `(T, η)`: unboxes.
    pub fn identity_on(sig: &Signature) -> Self {
        PointedMorphism::new("identity", PointedEndo::Tm(sig.clone()), |_, l| match l {
            Leaf::Boxed(t) => Ok((**t).clone()),
            other => Err(scope(format!("{other:?} is not a boxed term"))),
        })
    }

    /// `η : (Id, id) -> (T, η)`.
    pub fn eta() -> Self {
        PointedMorphism::new("eta", PointedEndo::Id, |_, l| Ok(Term::Var(l.clone())))
    }

    /// `(Ext, weaken) -> (T, η)` sending the fresh variable to `closed`.
    /// `closed` must not mention any free variable.
    pub fn const_closed(closed: Term) -> Self {
        PointedMorphism::new("const-closed", PointedEndo::Ext, move |_, l| match l {
            Leaf::New => Ok(closed.clone()),
            Leaf::Old(x) => Ok(Term::Var((**x).clone())),
            other => Err(scope(format!("{other:?} is not a leaf of an extended context"))),
        })
    }

    /// `self ∘ g` for a pointed transformation `g : (Z2, e2) -> (Z, e)`.
    pub fn precompose(&self, g: &PointedTransform) -> Self {
        let f = self.component.clone();
        let gc = g.component.clone();
        PointedMorphism {
            name: format!("{}∘{}", self.name, g.name),
            z: g.source.clone(),
            component: Arc::new(move |c, l| f(c, &gc(c, l)?)),
        }
    }

    /// `beta ∘ self` for a term transformer `beta` acting at each context.
    pub fn post_compose<B>(&self, name: &str, beta: B) -> Self
    where
        B: Fn(&Ctx, &Term) -> Result<Term> + Send + Sync + 'static,
    {
        let f = self.component.clone();
        PointedMorphism {
            name: format!("{name}∘{}", self.name),
            z: self.z.clone(),
            component: Arc::new(move |c, l| beta(c, &f(c, l)?)),
        }
    }
}

pub type TransformFn = dyn Fn(&Ctx, &Leaf) -> Result<Leaf> + Send + Sync;

/// A morphism of pointed endofunctors `(Z2, e2) -> (Z, e)`.
#[derive(Clone)]
pub struct PointedTransform {
    name: String,
    source: PointedEndo,
    target: PointedEndo,
    component: Arc<TransformFn>,
}

impl fmt::Debug for PointedTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointedTransform({} : {} -> {})", self.name, self.source, self.target)
    }
}

impl PointedTransform {
    pub fn new<F>(name: impl Into<String>, source: PointedEndo, target: PointedEndo, f: F) -> Self
    where
        F: Fn(&Ctx, &Leaf) -> Result<Leaf> + Send + Sync + 'static,
    {
        PointedTransform { name: name.into(), source, target, component: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &PointedEndo {
        &self.source
    }

    pub fn target(&self) -> &PointedEndo {
        &self.target
    }

    pub fn at(&self, c: &Ctx) -> LeafMap {
        let f = self.component.clone();
        let c2 = c.clone();
        LeafMap::new(self.source.on_ctx(c), self.target.on_ctx(c), move |l| f(&c2, l))
    }

    /// The point `e : (Id, id) -> (Z, e)`.
    pub fn from_point(z: &PointedEndo) -> Self {
        let z2 = z.clone();
        PointedTransform::new("point", PointedEndo::Id, z.clone(), move |c, l| {
            z2.point(c).apply(l)
        })
    }

    /// `Ext·Ext -> Ext`, identifying the two fresh variables.
    pub fn contract_ext() -> Self {
        PointedTransform::new(
            "contract",
            PointedEndo::compose(PointedEndo::Ext, PointedEndo::Ext),
            PointedEndo::Ext,
            |_, l| match l {
                Leaf::New => Ok(Leaf::New),
                Leaf::Old(x) => Ok((**x).clone()),
                other => Err(scope(format!("{other:?} is not a leaf of an extended context"))),
            },
        )
    }

    /// `Ext -> Tm` sending the fresh variable to a boxed closed term.
    pub fn ext_into_tm(sig: &Signature, closed: Term) -> Self {
        PointedTransform::new("ext-into-tm", PointedEndo::Ext, PointedEndo::Tm(sig.clone()), move |_, l| {
            match l {
                Leaf::New => Ok(Leaf::boxed(closed.clone())),
                Leaf::Old(x) => Ok(Leaf::boxed(Term::Var((**x).clone()))),
                other => Err(scope(format!("{other:?} is not a leaf of an extended context"))),
            }
        })
    }
}
