//! Seeded random generation of well-scoped terms, leaves and renamings.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ctx::{Ctx, Leaf, LeafMap};
use crate::error::{Error, Result};
use crate::signature::{Arity, Signature};
use crate::term::Term;

const MIN_SIZE_FUEL: usize = 8;

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    /// Maximum nesting of flattening payloads inside generated terms.
    pub max_flat_depth: usize,
    /// Probability of stopping at a variable when a constructor would fit;
    /// it is scaled down as the remaining budget grows.
    pub leaf_bias: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_flat_depth: 2, leaf_bias: 0.3 }
    }
}

/// A term over `c`, deterministic in `(sig, c, budget, seed)`.
///
/// The size is at most `budget + 1`, unless no term over `c` is that small,
/// in which case a smallest term is returned.
pub fn random_term(sig: &Signature, c: &Ctx, budget: usize, seed: u64) -> Result<Term> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Generator::new(sig).term(&mut rng, c, budget)
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug)]
pub struct Generator<'a> {
    sig: &'a Signature,
    cfg: GenConfig,
}

impl<'a> Generator<'a> {
    pub fn new(sig: &'a Signature) -> Self {
        Generator { sig, cfg: GenConfig::default() }
    }

    pub fn with_config(sig: &'a Signature, cfg: GenConfig) -> Self {
        Generator { sig, cfg }
    }

    pub fn signature(&self) -> &'a Signature {
        self.sig
    }

    /// Size of a smallest term over `c`, or `None` when there is none
    /// (within the flattening depth cap).
    pub fn min_size(&self, c: &Ctx) -> Option<usize> {
        self.min_size_at(c, 0, MIN_SIZE_FUEL)
    }

    fn min_size_at(&self, c: &Ctx, fd: usize, fuel: usize) -> Option<usize> {
        if fuel == 0 {
            return None;
        }
        let mut best = self.leaf_min(c, fd, fuel - 1).map(|x| 1 + x);
        for arity in self.sig.arities() {
            let cost = match arity {
                Arity::Binding(ks) if ks.iter().all(|&k| k > 0) => Some(1 + ks.len()),
                // a k = 0 argument costs at least as much as the whole term
                Arity::Binding(_) => None,
                Arity::Flattening if fd < self.cfg.max_flat_depth => {
                    self.min_size_at(&c.tm_over(), fd + 1, fuel - 1).map(|x| 1 + x)
                }
                Arity::Flattening => None,
            };
            best = min_opt(best, cost);
        }
        best
    }

    fn leaf_min(&self, c: &Ctx, fd: usize, fuel: usize) -> Option<usize> {
        match c {
            Ctx::Fin(0) => None,
            Ctx::Fin(_) | Ctx::Ext(_) => Some(0),
            Ctx::TmOver(inner) => self.min_size_at(inner, fd, fuel),
        }
    }

    fn arg_min(&self, c: &Ctx, k: usize, fd: usize) -> Option<usize> {
        if k > 0 {
            Some(1)
        } else {
            self.min_size_at(c, fd, MIN_SIZE_FUEL)
        }
    }

    fn arity_cost(&self, arity: &Arity, c: &Ctx, fd: usize) -> Option<usize> {
        match arity {
            Arity::Binding(ks) => ks
                .iter()
                .map(|&k| self.arg_min(c, k, fd))
                .try_fold(1, |acc, m| m.map(|m| acc + m)),
            Arity::Flattening if fd < self.cfg.max_flat_depth => {
                self.min_size_at(&c.tm_over(), fd + 1, MIN_SIZE_FUEL).map(|x| 1 + x)
            }
            Arity::Flattening => None,
        }
    }

    pub fn term<R: Rng>(&self, rng: &mut R, c: &Ctx, budget: usize) -> Result<Term> {
        self.gen(rng, c, budget, 0, false)
    }

    /// A term with a budget drawn uniformly from `0..=max_budget`.
    pub fn term_upto<R: Rng>(&self, rng: &mut R, c: &Ctx, max_budget: usize) -> Result<Term> {
        let budget = rng.gen_range(0..=max_budget);
        self.term(rng, c, budget)
    }

    /// A term whose root is a constructor node.
    pub fn node<R: Rng>(&self, rng: &mut R, c: &Ctx, budget: usize) -> Result<Term> {
        self.gen(rng, c, budget, 0, true)
    }

    /// A well-formed leaf of `c` whose boxed contents have size at most
    /// `budget` where possible.
    pub fn leaf<R: Rng>(&self, rng: &mut R, c: &Ctx, budget: usize) -> Result<Leaf> {
        match self.leaf_min(c, 0, MIN_SIZE_FUEL) {
            None => Err(Error::Generation(c.clone())),
            Some(m) => self.gen_leaf(rng, c, budget.max(m), 0),
        }
    }

    fn gen<R: Rng>(&self, rng: &mut R, c: &Ctx, budget: usize, fd: usize, force_node: bool) -> Result<Term> {
        let leaf_ok = |b: usize| !force_node && self.leaf_min(c, fd, MIN_SIZE_FUEL).is_some_and(|m| m <= b);
        let nodes_ok = |b: usize| -> Vec<usize> {
            self.sig
                .arities()
                .iter()
                .enumerate()
                .filter(|(_, a)| self.arity_cost(a, c, fd).is_some_and(|m| m <= b + 1))
                .map(|(i, _)| i)
                .collect()
        };

        let mut budget = budget;
        let mut nodes = nodes_ok(budget);
        if !leaf_ok(budget) && nodes.is_empty() {
            let leaf_min = if force_node { None } else { self.leaf_min(c, fd, MIN_SIZE_FUEL).map(|x| x + 1) };
            let node_min = self
                .sig
                .arities()
                .iter()
                .filter_map(|a| self.arity_cost(a, c, fd))
                .min();
            let smallest = min_opt(leaf_min, node_min).ok_or_else(|| Error::Generation(c.clone()))?;
            budget = smallest - 1;
            nodes = nodes_ok(budget);
        }

        let p_leaf = self.cfg.leaf_bias * 4.0 / (4.0 + budget as f64);
        if leaf_ok(budget) && (nodes.is_empty() || rng.gen_bool(p_leaf)) {
            return Ok(Term::Var(self.gen_leaf(rng, c, budget, fd)?));
        }
        let op = *nodes.choose(rng).expect("a fitting constructor exists");
        self.gen_node(rng, op, c, budget, fd)
    }

    fn gen_node<R: Rng>(&self, rng: &mut R, op: usize, c: &Ctx, budget: usize, fd: usize) -> Result<Term> {
        match self.sig.arity(op)? {
            Arity::Binding(ks) => {
                let mins: Vec<usize> = ks
                    .iter()
                    .map(|&k| self.arg_min(c, k, fd).expect("cost was finite"))
                    .collect();
                let allocs = split_budget(rng, budget, &mins);
                let args = ks
                    .iter()
                    .zip(allocs)
                    .map(|(&k, size)| self.gen(rng, &c.ext_n(k), size - 1, fd, false))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Term::Node(op, args))
            }
            Arity::Flattening => {
                let payload = self.gen(rng, &c.tm_over(), budget.saturating_sub(1), fd + 1, false)?;
                Ok(Term::Node(op, vec![payload]))
            }
        }
    }

    fn gen_leaf<R: Rng>(&self, rng: &mut R, c: &Ctx, budget: usize, fd: usize) -> Result<Leaf> {
        match c {
            Ctx::Fin(0) => Err(Error::Generation(c.clone())),
            Ctx::Fin(n) => Ok(Leaf::Idx(rng.gen_range(0..*n))),
            Ctx::Ext(inner) => {
                let old_ok = self.leaf_min(inner, fd, MIN_SIZE_FUEL).is_some_and(|m| m <= budget);
                if old_ok && rng.gen_bool(0.5) {
                    Ok(Leaf::old(self.gen_leaf(rng, inner, budget, fd)?))
                } else {
                    Ok(Leaf::New)
                }
            }
            Ctx::TmOver(inner) => {
                let m = self.min_size_at(inner, fd, MIN_SIZE_FUEL).ok_or_else(|| Error::Generation(c.clone()))?;
                let size = if budget > m { rng.gen_range(m..=budget) } else { m };
                Ok(Leaf::boxed(self.gen(rng, inner, size - 1, fd, false)?))
            }
        }
    }
}

fn min_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Sizes for each argument: at least its minimum, in total exactly `budget`
/// (when the minima allow it).
fn split_budget<R: Rng>(rng: &mut R, budget: usize, mins: &[usize]) -> Vec<usize> {
    let need: usize = mins.iter().sum();
    let slack = budget.saturating_sub(need);
    let mut cuts: Vec<usize> = (1..mins.len()).map(|_| rng.gen_range(0..=slack)).collect();
    cuts.sort_unstable();
    cuts.push(slack);
    let mut prev = 0;
    mins.iter()
        .zip(cuts)
        .map(|(&m, cut)| {
            let share = cut - prev;
            prev = cut;
            m + share
        })
        .collect()
}

/// A small base context: mostly `Fin(0..=3)`, sometimes under one binder.
pub fn sample_base_ctx<R: Rng>(rng: &mut R) -> Ctx {
    if rng.gen_bool(0.2) {
        Ctx::Fin(rng.gen_range(0..=2)).ext()
    } else {
        Ctx::Fin(rng.gen_range(0..=3))
    }
}

/// A `Fin`-only context, `Fin(0..=max)`.
pub fn sample_fin_ctx<R: Rng>(rng: &mut R, max: usize) -> Ctx {
    Ctx::Fin(rng.gen_range(0..=max))
}

/// A random renaming `Fin(n) -> Fin(m)`; `m` must be positive when `n` is.
pub fn random_renaming<R: Rng>(rng: &mut R, n: usize, m: usize) -> LeafMap {
    let table = (0..n).map(|_| rng.gen_range(0..m)).collect();
    LeafMap::tabulated(n, m, table).expect("table is in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten::{self, lam};
    use crate::term::validate;

    #[test]
    fn minimal_closed_lambda_term() {
        let t = random_term(&flatten::lc(), &Ctx::Fin(0), 0, 3).unwrap();
        assert_eq!(t, lam(Term::Var(Leaf::New)));
        assert_eq!(Generator::new(&flatten::lc()).min_size(&Ctx::Fin(0)), Some(2));
    }

    #[test]
    fn deterministic_per_seed() {
        let sig = flatten::lce();
        let a = random_term(&sig, &Ctx::Fin(2), 30, 7).unwrap();
        let b = random_term(&sig, &Ctx::Fin(2), 30, 7).unwrap();
        assert_eq!(a, b);
        assert!(validate(&sig, &Ctx::Fin(2), &a));
    }

    #[test]
    fn no_term_means_generation_error() {
        let only_app: Signature = "bind:0,0".parse().unwrap();
        assert!(matches!(random_term(&only_app, &Ctx::Fin(0), 5, 0), Err(Error::Generation(_))));
        let only_flat: Signature = "flat".parse().unwrap();
        assert!(matches!(random_term(&only_flat, &Ctx::Fin(0), 5, 0), Err(Error::Generation(_))));
        let unary: Signature = "bind:0".parse().unwrap();
        assert_eq!(random_term(&unary, &Ctx::Fin(1), 0, 0).unwrap(), Term::idx(0));
    }

    #[test]
    fn budget_zero_prefers_a_variable() {
        let sig = flatten::lce();
        for seed in 0..20 {
            let t = random_term(&sig, &Ctx::Fin(2), 0, seed).unwrap();
            assert!(t.is_var());
        }
        // no leaf of TmOver(Fin 1) fits in budget 0
        let t = random_term(&sig, &Ctx::Fin(1).tm_over(), 0, 1).unwrap();
        assert!(validate(&sig, &Ctx::Fin(1).tm_over(), &t));
        assert_eq!(t.size(), 2);
    }

    #[test]
    fn forced_nodes() {
        let sig = flatten::lce();
        let g = Generator::new(&sig);
        let mut rng = rng_for(1, 0);
        for _ in 0..50 {
            let t = g.node(&mut rng, &Ctx::Fin(1), 6).unwrap();
            assert!(!t.is_var());
            assert!(validate(&sig, &Ctx::Fin(1), &t));
        }
    }

    #[test]
    fn split_respects_minima() {
        let mut rng = rng_for(0, 0);
        for _ in 0..100 {
            let parts = split_budget(&mut rng, 10, &[1, 3]);
            assert!(parts[0] >= 1 && parts[1] >= 3);
            assert!(parts.iter().sum::<usize>() <= 10);
        }
    }
}
