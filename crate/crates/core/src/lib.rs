//! Heterogeneous substitution systems over well-scoped de Bruijn syntax.
//!
//! Terms are built from a binding signature (with an optional explicit
//! flattening constructor). Substitution is not written per signature: it is
//! the bracket operation `{f}` of a substitution system, obtained generically
//! by Mendler-style iteration, and the monad multiplication is `{id}`.
//!
//! The crate also ships law checkers that test the defining diagrams on
//! seeded random samples, an independent shift-based oracle, and the
//! λ-calculus with explicit flattening as a worked example.

pub mod cli;
pub mod ctx;
pub mod error;
pub mod flatten;
pub mod gen;
pub mod gfold;
pub mod laws;
pub mod oracle;
pub mod pointed;
pub mod signature;
pub mod subst;
pub mod syntax;
pub mod system;
pub mod term;

pub use ctx::{compose_map, id_map, leaf_is_wf, weaken_map, Ctx, Leaf, LeafMap};
pub use error::{Error, Result};
pub use pointed::{dist_map, eta_wrap_map, PointedEndo, PointedMorphism, PointedTransform};
pub use signature::{strength_binding, strength_flat, sum_sig, Arity, Signature};
pub use subst::{bracket, mu, subst, subst1, SubstRule};
pub use term::{map_leaves, validate, Term};
