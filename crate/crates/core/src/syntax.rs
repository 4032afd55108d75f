//! Concrete syntax: de Bruijn numerals, `\.` / `lam.` abstraction,
//! left-associative juxtaposition, and `flat{ outer | e1, ..., em }` for
//! explicit flattening, where free indices of `outer` point into the
//! environment.

use crate::ctx::{Ctx, Leaf};
use crate::error::{Error, Result};
use crate::signature::{Arity, Signature};
use crate::term::{for_each_base_leaf, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lam,
    Dot,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Bar,
    Comma,
    Flat,
    Nat(usize),
}

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

fn tokenize(input: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let single = match b {
            b'\\' => Some(Tok::Lam),
            b'.' => Some(Tok::Dot),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'{' => Some(Tok::LBrace),
            b'}' => Some(Tok::RBrace),
            b'|' => Some(Tok::Bar),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((i, tok));
            i += 1;
        } else if b.is_ascii_whitespace() {
            i += 1;
        } else if b.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = input[start..i]
                .parse()
                .map_err(|_| parse_err(start, "numeral out of range"))?;
            out.push((start, Tok::Nat(n)));
        } else if b.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            match &input[start..i] {
                "lam" => out.push((start, Tok::Lam)),
                "flat" => out.push((start, Tok::Flat)),
                word => return Err(parse_err(start, format!("unexpected word `{word}`"))),
            }
        } else {
            let ch = input[i..].chars().next().unwrap_or('?');
            return Err(parse_err(i, format!("unexpected character `{ch}`")));
        }
    }
    Ok(out)
}

/// Parse tree before scope resolution; positions are byte offsets.
#[derive(Debug)]
enum PTerm {
    Nat(usize, usize),
    App(usize, Box<PTerm>, Box<PTerm>),
    Abs(usize, Box<PTerm>),
    Flat(usize, Box<PTerm>, Vec<PTerm>),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(parse_err(self.here(), format!("expected {what}")))
        }
    }

    fn term(&mut self) -> Result<PTerm> {
        if self.peek() == Some(&Tok::Lam) {
            let at = self.here();
            self.pos += 1;
            self.expect(Tok::Dot, "`.` after abstraction")?;
            return Ok(PTerm::Abs(at, Box::new(self.term()?)));
        }
        let at = self.here();
        let mut acc = self.atom()?;
        while matches!(self.peek(), Some(Tok::Nat(_) | Tok::LParen | Tok::Flat)) {
            let arg = self.atom()?;
            acc = PTerm::App(at, Box::new(acc), Box::new(arg));
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<PTerm> {
        let at = self.here();
        match self.peek() {
            Some(Tok::Nat(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(PTerm::Nat(at, n))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Tok::Flat) => {
                self.pos += 1;
                self.expect(Tok::LBrace, "`{` after flat")?;
                let outer = self.term()?;
                self.expect(Tok::Bar, "`|` in flat")?;
                let mut env = Vec::new();
                if self.peek() != Some(&Tok::RBrace) {
                    env.push(self.term()?);
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        env.push(self.term()?);
                    }
                }
                self.expect(Tok::RBrace, "`}` or `,` in flat")?;
                Ok(PTerm::Flat(at, Box::new(outer), env))
            }
            _ => Err(parse_err(at, "expected a term")),
        }
    }
}

/// Constructor ids the grammar maps to.
#[derive(Clone, Copy, Debug)]
struct Ops {
    app: Option<usize>,
    abs: Option<usize>,
    flat: Option<usize>,
}

impl Ops {
    fn of(sig: &Signature) -> Self {
        Ops {
            app: sig.position(&Arity::Binding(vec![0, 0])),
            abs: sig.position(&Arity::Binding(vec![1])),
            flat: sig.position(&Arity::Flattening),
        }
    }
}

/// What free indices resolve to.
enum Scope<'a> {
    Base(usize),
    Env(&'a [Term]),
}

fn resolve(p: &PTerm, ops: Ops, scope: &Scope<'_>, depth: usize) -> Result<Term> {
    let missing = |at: usize, what: &str| parse_err(at, format!("signature has no {what} constructor"));
    match p {
        PTerm::Nat(at, i) => {
            if *i < depth {
                return Ok(Term::Var(Leaf::old_n(*i, Leaf::New)));
            }
            let j = i - depth;
            let base = match scope {
                Scope::Base(n) if j < *n => Leaf::Idx(j),
                Scope::Base(n) => {
                    return Err(Error::Scope(format!("index {i} at offset {at} is unbound in scope {n}")))
                }
                Scope::Env(env) if j < env.len() => Leaf::boxed(env[j].clone()),
                Scope::Env(env) => {
                    return Err(Error::Scope(format!(
                        "index {i} at offset {at} exceeds the {} flat environment entries",
                        env.len()
                    )))
                }
            };
            Ok(Term::Var(Leaf::old_n(depth, base)))
        }
        PTerm::App(at, f, a) => {
            let op = ops.app.ok_or_else(|| missing(*at, "application"))?;
            Ok(Term::Node(op, vec![resolve(f, ops, scope, depth)?, resolve(a, ops, scope, depth)?]))
        }
        PTerm::Abs(at, body) => {
            let op = ops.abs.ok_or_else(|| missing(*at, "abstraction"))?;
            Ok(Term::Node(op, vec![resolve(body, ops, scope, depth + 1)?]))
        }
        PTerm::Flat(at, outer, env) => {
            let op = ops.flat.ok_or_else(|| missing(*at, "flattening"))?;
            let env = env.iter().map(|e| resolve(e, ops, scope, depth)).collect::<Result<Vec<_>>>()?;
            Ok(Term::Node(op, vec![resolve(outer, ops, &Scope::Env(&env), 0)?]))
        }
    }
}

/// Parses a term over `Fin(scope)`.
pub fn parse_term(input: &str, sig: &Signature, scope: usize) -> Result<Term> {
    let mut parser = Parser { toks: tokenize(input)?, pos: 0, end: input.len() };
    let p = parser.term()?;
    if parser.pos != parser.toks.len() {
        return Err(parse_err(parser.here(), "unexpected trailing input"));
    }
    resolve(&p, Ops::of(sig), &Scope::Base(scope), 0)
}

enum PScope<'a> {
    /// Leaves of the base context in de Bruijn order; `None` prints
    /// `Idx(i)` as `i` without a bound.
    Base(Option<&'a [Leaf]>),
    Env(&'a [Term]),
}

fn unsupported(msg: impl Into<String>) -> Error {
    Error::Unsupported(msg.into())
}

fn print_leaf(l: &Leaf, scope: &PScope<'_>, depth: usize) -> Result<usize> {
    let mut cur = l;
    for j in 0..depth {
        match cur {
            Leaf::New => return Ok(j),
            Leaf::Old(x) => cur = x,
            other => return Err(unsupported(format!("{other:?} under a binder"))),
        }
    }
    let pos = match (scope, cur) {
        (PScope::Base(None), Leaf::Idx(i)) => Some(*i),
        (PScope::Base(Some(leaves)), l) => leaves.iter().position(|b| b == l),
        (PScope::Env(env), Leaf::Boxed(w)) => env.iter().position(|e| e == &**w),
        _ => None,
    };
    pos.map(|p| depth + p).ok_or_else(|| unsupported(format!("cannot name {cur:?}")))
}

fn print_into(t: &Term, sig: &Signature, ops: Ops, scope: &PScope<'_>, depth: usize, out: &mut String) -> Result<()> {
    match t {
        Term::Var(l) => {
            out.push_str(&print_leaf(l, scope, depth)?.to_string());
            Ok(())
        }
        Term::Node(op, args) if Some(*op) == ops.app => {
            let mut spine = vec![&args[1]];
            let mut head = &args[0];
            while let Term::Node(h, hargs) = head {
                if Some(*h) != ops.app {
                    break;
                }
                spine.push(&hargs[1]);
                head = &hargs[0];
            }
            spine.push(head);
            out.push('(');
            for (i, item) in spine.iter().rev().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let wrap = matches!(item, Term::Node(o, _) if Some(*o) == ops.abs);
                if wrap {
                    out.push('(');
                }
                print_into(item, sig, ops, scope, depth, out)?;
                if wrap {
                    out.push(')');
                }
            }
            out.push(')');
            Ok(())
        }
        Term::Node(op, args) if Some(*op) == ops.abs => {
            out.push_str("\\.");
            print_into(&args[0], sig, ops, scope, depth + 1, out)
        }
        Term::Node(op, args) if Some(*op) == ops.flat => {
            let u = &args[0];
            let mut env: Vec<Term> = Vec::new();
            let mut bad = None;
            for_each_base_leaf(sig, u, &mut |l| match l {
                Leaf::Boxed(w) => {
                    if !env.contains(w) {
                        env.push((**w).clone());
                    }
                }
                other => bad = Some(other.clone()),
            })?;
            if let Some(l) = bad {
                return Err(unsupported(format!("{l:?} in a flattening payload")));
            }
            out.push_str("flat{ ");
            print_into(u, sig, ops, &PScope::Env(&env), 0, out)?;
            out.push_str(" |");
            for (i, e) in env.iter().enumerate() {
                out.push_str(if i == 0 { " " } else { ", " });
                print_into(e, sig, ops, scope, depth, out)?;
            }
            out.push_str(" }");
            Ok(())
        }
        Term::Node(op, _) => Err(unsupported(format!(
            "constructor {op} ({}) has no concrete syntax",
            sig.arity(*op).map(|a| a.to_string()).unwrap_or_default()
        ))),
    }
}

/// Prints a term whose free variables are `Idx` leaves.
pub fn print_term(t: &Term, sig: &Signature) -> Result<String> {
    let mut out = String::new();
    print_into(t, sig, Ops::of(sig), &PScope::Base(None), 0, &mut out)?;
    Ok(out)
}

/// Prints a term over a finite context, numbering its variables in de
/// Bruijn order.
pub fn print_term_in(t: &Term, sig: &Signature, c: &Ctx) -> Result<String> {
    let leaves = c.leaves().ok_or_else(|| unsupported(format!("{c} has no numerals")))?;
    let mut out = String::new();
    print_into(t, sig, Ops::of(sig), &PScope::Base(Some(&leaves)), 0, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten::{self, app, flat, lam};

    fn var(l: Leaf) -> Term {
        Term::Var(l)
    }

    #[test]
    fn parse_examples() {
        let lce = flatten::lce();
        assert_eq!(parse_term("\\.0", &lce, 0).unwrap(), lam(var(Leaf::New)));
        assert_eq!(parse_term("lam . 0", &lce, 0).unwrap(), lam(var(Leaf::New)));
        assert_eq!(
            parse_term("flat{ 0 | \\.0 }", &lce, 0).unwrap(),
            flat(var(Leaf::boxed(lam(var(Leaf::New)))))
        );
        // the body of an abstraction extends as far right as possible
        assert_eq!(
            parse_term("(\\.0 1)", &lce, 2).unwrap(),
            lam(app(var(Leaf::New), var(Leaf::old(Leaf::Idx(0)))))
        );
        assert_eq!(
            parse_term("(\\.0) 1", &lce, 2).unwrap(),
            app(lam(var(Leaf::New)), Term::idx(1))
        );
        assert_eq!(
            parse_term("0 1 0", &lce, 2).unwrap(),
            app(app(Term::idx(0), Term::idx(1)), Term::idx(0))
        );
    }

    #[test]
    fn env_indices_under_binders() {
        let lce = flatten::lce();
        // outer binder shifts env references; env parses in the ambient scope
        let t = parse_term("\\.flat{ \\.(1 0) | 0 }", &lce, 0).unwrap();
        let boxed = Leaf::boxed(var(Leaf::New));
        assert_eq!(t, lam(flat(lam(app(var(Leaf::old(boxed)), var(Leaf::New))))));
    }

    #[test]
    fn errors() {
        let lce = flatten::lce();
        assert!(matches!(parse_term("(0 1)", &lce, 0), Err(Error::Scope(_))));
        assert!(matches!(parse_term("flat{ 1 | 0 }", &lce, 1), Err(Error::Scope(_))));
        assert!(matches!(parse_term("(0", &lce, 1), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_term("0 \\.0", &lce, 1), Err(Error::Parse { .. })));
        assert!(matches!(parse_term("x", &lce, 1), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_term("", &lce, 1), Err(Error::Parse { .. })));
        assert!(matches!(parse_term("flat{ 0 | 0 }", &flatten::lc(), 1), Err(Error::Parse { .. })));
    }

    #[test]
    fn print_examples() {
        let lce = flatten::lce();
        assert_eq!(print_term(&lam(var(Leaf::New)), &lce).unwrap(), "\\.0");
        let u = lam(var(Leaf::New));
        let t = flat(app(var(Leaf::boxed(u.clone())), var(Leaf::boxed(u))));
        assert_eq!(print_term(&t, &lce).unwrap(), "flat{ (0 0) | \\.0 }");
        let t = app(app(lam(var(Leaf::New)), Term::idx(0)), app(Term::idx(1), Term::idx(0)));
        assert_eq!(print_term(&t, &lce).unwrap(), "((\\.0) 0 (1 0))");
        let empty = flat(lam(var(Leaf::New)));
        assert_eq!(print_term(&empty, &lce).unwrap(), "flat{ \\.0 | }");
    }

    #[test]
    fn canonical_text_round_trips() {
        let lce = flatten::lce();
        for text in [
            "\\.0",
            "(0 1)",
            "((\\.0) 0 (1 0))",
            "\\.(0 1)",
            "flat{ (0 1) | \\.0, 0 }",
            "\\.flat{ \\.(1 0) | 0 }",
            "flat{ flat{ (0 1) | 0, \\.0 } | 1 }",
            "flat{ \\.0 | }",
        ] {
            let t = parse_term(text, &lce, 2).unwrap();
            assert_eq!(print_term(&t, &lce).unwrap(), text);
        }
    }

    #[test]
    fn duplicate_constructors_are_not_printable() {
        let t = Term::Node(flatten::APP2, vec![Term::idx(0), Term::idx(0)]);
        assert!(matches!(print_term(&t, &flatten::dupapp()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn prints_over_extended_contexts() {
        let lc = flatten::lc();
        let c = Ctx::Fin(1).ext();
        let t = app(var(Leaf::New), var(Leaf::old(Leaf::Idx(0))));
        assert_eq!(print_term_in(&t, &lc, &c).unwrap(), "(0 1)");
    }
}
