//! Binding signatures and their strengths.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::ctx::{Ctx, Leaf};
use crate::error::{scope, Error, Result};
use crate::pointed::{dist_map, PointedEndo};
use crate::term::{self, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Arity {
    /// One argument per entry; the entry is the number of variables that
    /// argument binds.
    Binding(Vec<usize>),
    /// Explicit flattening: a single argument that is a term whose
    /// variables are terms.
    Flattening,
}

impl Arity {
    pub fn arg_count(&self) -> usize {
        match self {
            Arity::Binding(ks) => ks.len(),
            Arity::Flattening => 1,
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Flattening => f.write_str("flat"),
            Arity::Binding(ks) => {
                f.write_str("bind:")?;
                for (i, k) in ks.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{k}")?;
                }
                Ok(())
            }
        }
    }
}

/// An ordered list of arities; position `i` is the constructor id `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    arities: Arc<[Arity]>,
}

impl Signature {
    pub fn new(arities: Vec<Arity>) -> Self {
        Signature { arities: arities.into() }
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn arities(&self) -> &[Arity] {
        &self.arities
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    pub fn arity(&self, op: usize) -> Result<&Arity> {
        self.arities.get(op).ok_or(Error::UnknownArity { op, len: self.arities.len() })
    }

    pub fn position(&self, arity: &Arity) -> Option<usize> {
        self.arities.iter().position(|a| a == arity)
    }

    pub fn has_flattening(&self) -> bool {
        self.arities.contains(&Arity::Flattening)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.arities.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Accepts `lc`, `lce`, `dupapp`, or arities `bind:k1,...,kp` / `bind:` /
/// `flat` (and the names) joined by `+`.
impl FromStr for Signature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Signature::empty());
        }
        let mut sig = Signature::empty();
        for part in s.split('+') {
            let part = part.trim();
            let next = match part {
                "lc" => crate::flatten::lc(),
                "lce" => crate::flatten::lce(),
                "dupapp" => crate::flatten::dupapp(),
                "flat" => Signature::new(vec![Arity::Flattening]),
                _ => {
                    let Some(ks) = part.strip_prefix("bind:") else {
                        return Err(Error::Signature(format!("unknown arity `{part}`")));
                    };
                    let ks = if ks.trim().is_empty() {
                        Vec::new()
                    } else {
                        ks.split(',')
                            .map(|k| {
                                k.trim().parse::<usize>().map_err(|_| {
                                    Error::Signature(format!("bad binder count `{k}` in `{part}`"))
                                })
                            })
                            .collect::<Result<Vec<_>>>()?
                    };
                    Signature::new(vec![Arity::Binding(ks)])
                }
            };
            sig = sum_sig(&sig, &next);
        }
        Ok(sig)
    }
}

/// Concatenation; constructor ids of `s2` shift by `s1.len()`.
pub fn sum_sig(s1: &Signature, s2: &Signature) -> Signature {
    Signature::new(s1.arities.iter().chain(s2.arities.iter()).cloned().collect())
}

/// Strength of a binding arity at `X = T`: argument `i`, a term over
/// `Ext^{k_i}(Z c)`, is moved to `Z(Ext^{k_i} c)`.
pub fn strength_binding(
    sig: &Signature,
    binders: &[usize],
    z: &PointedEndo,
    args: &[Term],
    c: &Ctx,
) -> Result<Vec<Term>> {
    if binders.len() != args.len() {
        return Err(scope(format!("{} arguments for {} binder counts", args.len(), binders.len())));
    }
    let leaf_sig = z.term_signature().unwrap_or(sig);
    let zc = z.on_ctx(c);
    for (a, &k) in args.iter().zip(binders) {
        let src = zc.ext_n(k);
        if !term::validate_mixed(sig, leaf_sig, &src, a) {
            return Err(scope(format!("argument is not scope-valid over {src}")));
        }
    }
    theta_binding(sig, binders, z, args, c)
}

pub(crate) fn theta_binding(
    sig: &Signature,
    binders: &[usize],
    z: &PointedEndo,
    args: &[Term],
    c: &Ctx,
) -> Result<Vec<Term>> {
    args.iter()
        .zip(binders)
        .map(|(a, &k)| {
            if k == 0 {
                Ok(a.clone())
            } else {
                let d = dist_map(z, c, k);
                term::map_leaves_raw(sig, &|l: &Leaf| d.apply(l), a)
            }
        })
        .collect()
}

/// Strength of the flattening arity at `X = T`: inserts the point of `Z`
/// at every boxed leaf, `TmOver(Z c) -> Z(TmOver(Z c))`.
pub fn strength_flat(sig: &Signature, z: &PointedEndo, u: &Term, c: &Ctx) -> Result<Term> {
    let leaf_sig = z.term_signature().unwrap_or(sig);
    let src = z.on_ctx(c).tm_over();
    if !term::validate_mixed(sig, leaf_sig, &src, u) {
        return Err(scope(format!("flattening payload is not scope-valid over {src}")));
    }
    theta_flat(sig, z, u, c)
}

pub(crate) fn theta_flat(sig: &Signature, z: &PointedEndo, u: &Term, c: &Ctx) -> Result<Term> {
    let e = z.point(&z.on_ctx(c).tm_over());
    term::map_leaves_raw(sig, &|l: &Leaf| e.apply(l), u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten::{self, lam};
    use crate::term::Term;

    fn var(l: Leaf) -> Term {
        Term::Var(l)
    }

    #[test]
    fn sum_with_flattening_is_lce() {
        let flat = Signature::new(vec![Arity::Flattening]);
        assert_eq!(sum_sig(&flatten::lc(), &flat), flatten::lce());
        assert_eq!(sum_sig(&Signature::empty(), &flatten::lc()), flatten::lc());
        let app = Signature::new(vec![Arity::Binding(vec![0, 0])]);
        let dup = sum_sig(&app, &app);
        assert_eq!(dup.arities(), &[Arity::Binding(vec![0, 0]), Arity::Binding(vec![0, 0])]);
    }

    #[test]
    fn parses_inline_and_named_forms() {
        let s: Signature = "bind:0,0+bind:1+flat".parse().unwrap();
        assert_eq!(s, flatten::lce());
        assert_eq!("lc".parse::<Signature>().unwrap(), flatten::lc());
        assert_eq!("lc+flat".parse::<Signature>().unwrap(), flatten::lce());
        assert_eq!(flatten::lce().to_string(), "bind:0,0+bind:1+flat");
        let constant: Signature = "bind:".parse().unwrap();
        assert_eq!(constant.arities(), &[Arity::Binding(vec![])]);
        assert!("bind:x".parse::<Signature>().is_err());
        assert!("lambda".parse::<Signature>().is_err());
    }

    #[test]
    fn application_strength_is_identity() {
        let sig = flatten::lc();
        let z = PointedEndo::Tm(sig.clone());
        let c = Ctx::Fin(1);
        let a = var(Leaf::boxed(var(Leaf::Idx(0))));
        let args = vec![a.clone(), lam(var(Leaf::New))];
        let out = strength_binding(&sig, &[0, 0], &z, &args, &c).unwrap();
        assert_eq!(out, args);
    }

    #[test]
    fn abstraction_strength_at_term_functor() {
        let sig = flatten::lc();
        let z = PointedEndo::Tm(sig.clone());
        let out = strength_binding(&sig, &[1], &z, &[var(Leaf::New)], &Ctx::Fin(0)).unwrap();
        assert_eq!(out, vec![var(Leaf::boxed(var(Leaf::New)))]);

        let arg = var(Leaf::old(Leaf::boxed(var(Leaf::Idx(0)))));
        let out = strength_binding(&sig, &[1], &z, &[arg], &Ctx::Fin(1)).unwrap();
        assert_eq!(out, vec![var(Leaf::boxed(var(Leaf::old(Leaf::Idx(0)))))]);
    }

    #[test]
    fn binding_strength_rejects_out_of_scope_argument() {
        let sig = flatten::lc();
        let z = PointedEndo::Ext;
        // Ext^1(Ext(Fin 0)) has no Idx leaves.
        let err = strength_binding(&sig, &[1], &z, &[var(Leaf::Idx(0))], &Ctx::Fin(0));
        assert!(matches!(err, Err(Error::Scope(_))));
    }

    #[test]
    fn flattening_strength() {
        let sig = flatten::lce();
        let t = lam(var(Leaf::New));
        let u = var(Leaf::boxed(t.clone()));
        assert_eq!(strength_flat(&sig, &PointedEndo::Id, &u, &Ctx::Fin(0)).unwrap(), u);

        let z = PointedEndo::Tm(sig.clone());
        let out = strength_flat(&sig, &z, &u, &Ctx::Fin(0)).unwrap();
        assert_eq!(out, var(Leaf::boxed(var(Leaf::boxed(t)))));

        let inner = var(Leaf::old(Leaf::Idx(0)));
        let u = var(Leaf::boxed(inner.clone()));
        let out = strength_flat(&sig, &PointedEndo::Ext, &u, &Ctx::Fin(1)).unwrap();
        assert_eq!(out, var(Leaf::old(Leaf::boxed(inner))));
    }
}
