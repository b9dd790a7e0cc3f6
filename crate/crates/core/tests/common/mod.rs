//! Shared fixtures for the integration tests: a corpus of ground terms,
//! a random generator of well-typed redexes, and a bottom-up reference
//! semantics for the first-order fragment.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sci_core::bounds::Bounds;
use sci_core::denotational::TraceTuple;
use sci_core::events::{alphabet, is_cell_trace, Event, Trace};
use sci_core::syntax::{parse_judgment, BinOp, Context, Term, Type, UnOp};
use sci_core::typecheck::infer;

type Env = Vec<(String, Type)>;

/// Ground terms over `x:var, y:var`. Covers every first-order construct,
/// bad variables, and `random`.
pub const CORPUS: &[&str] = &[
    "skip",
    "x := 1",
    "x := !x + 1",
    "x := !y; y := 0",
    "!x",
    "!x + !y",
    "2 - !x",
    "!x * 2",
    "!x / 2",
    "!x % 2",
    "!x = !y",
    "!x < 2",
    "fst pair(!x, !y) + snd pair(!y, 1)",
    "even !x",
    "ifzero !x then skip else x := 0",
    "ifzero !x then x else y",
    "x",
    "skip; y",
    "(ifzero !x then x else y) := 2",
    "x := 2; !x",
    "y := !x; !y",
    "x := !x; x := !x",
    "while !x = 2 do x := !x + 1",
    "while !x do x := !x - 1",
    "new z in z := !x; x := !y; y := !z",
    "new z in (z := !x + 1; !z)",
    "new a in new b in (a := !x; b := !y; x := !b; y := !a)",
    "new z in (while !z = 2 do z := !z + 1); x := !z",
    "x := random",
    "random + !x",
    "ifzero random then x := 1 else skip",
    "mkvar(lambda n:nat. x := n, !y) := 2",
    "!mkvar(lambda n:nat. skip, 1)",
    "mkvar(lambda n:nat. y := n - 1, !x)",
    "x := !mkvar(lambda n:nat. skip, !y + 1)",
    "diverge",
    "ifzero !x then diverge else skip",
    "diverge; !x",
];

pub fn corpus_context() -> Context {
    Context::vars(&["x", "y"])
}

/// Parses a corpus entry under `x:var, y:var` and returns it with its type.
pub fn corpus_term(src: &str) -> (Context, Term, Type) {
    let (_, m) = parse_judgment(src).expect("corpus term parses");
    let ctx = corpus_context();
    let ty = infer(&ctx, &m).expect("corpus term is typed").ty;
    (ctx, m, ty)
}

// ---------------------------------------------------------------------------
// Random well-typed terms.

pub struct TermGen {
    rng: ChaCha8Rng,
    next: usize,
    /// Leave out functions, applications and bad variables.
    pub first_order: bool,
}

const ARG_TYPES: &[&str] = &["comm", "nat", "var", "comm -o comm", "nat -o comm", "var -o comm", "nat -o nat"];

impl TermGen {
    pub fn new(seed: u64) -> TermGen {
        TermGen { rng: ChaCha8Rng::seed_from_u64(seed), next: 0, first_order: false }
    }

    fn fresh(&mut self, base: &str) -> String {
        self.next += 1;
        format!("{base}{}", self.next)
    }

    fn split(&mut self, env: &[(String, Type)]) -> (Env, Env) {
        let (mut l, mut r) = (Vec::new(), Vec::new());
        for e in env {
            if self.rng.gen_bool(0.5) {
                l.push(e.clone());
            } else {
                r.push(e.clone());
            }
        }
        (l, r)
    }

    /// Applies an identifier whose result type is `ty`, if there is one.
    fn call(&mut self, ty: &Type, env: &[(String, Type)], depth: usize) -> Option<Term> {
        let cands: Vec<&(String, Type)> = env.iter().filter(|(_, t)| matches!(t, Type::Arrow(..)) && t.uncurry().1 == *ty).collect();
        let (f, fty) = (*cands.choose(&mut self.rng)?).clone();
        let rest: Vec<(String, Type)> = env.iter().filter(|(n, _)| *n != f).cloned().collect();
        let (args, _) = fty.uncurry();
        let mut t = Term::ident(&f);
        let mut pool = rest;
        for a in &args {
            let (mine, others) = self.split(&pool);
            t = Term::app(t, self.term(a, &mine, depth.saturating_sub(1))?);
            pool = others;
        }
        Some(t)
    }

    fn leaf(&mut self, ty: &Type, env: &[(String, Type)]) -> Option<Term> {
        let ids: Vec<&String> = env.iter().filter(|(_, t)| t == ty).map(|(n, _)| n).collect();
        let vars: Vec<&String> = env.iter().filter(|(_, t)| *t == Type::Var).map(|(n, _)| n).collect();
        let use_id = self.rng.gen_bool(0.7);
        match ty {
            Type::Comm => match ids.choose(&mut self.rng) {
                Some(c) if use_id => Some(Term::ident(c)),
                _ => match vars.choose(&mut self.rng) {
                    Some(v) if use_id => Some(Term::assign(Term::ident(v), Term::Num(self.rng.gen_range(0..2)))),
                    _ => Some(Term::Skip),
                },
            },
            Type::Nat => match ids.choose(&mut self.rng) {
                Some(n) if use_id => Some(Term::ident(n)),
                _ => match vars.choose(&mut self.rng) {
                    Some(v) if use_id => Some(Term::deref(Term::ident(v))),
                    _ => Some(Term::Num(self.rng.gen_range(0..2))),
                },
            },
            Type::Var => ids.choose(&mut self.rng).map(|v| Term::ident(v)),
            Type::Arrow(a, b) => {
                let x = self.fresh("u");
                let mut env2 = env.to_vec();
                env2.push((x.clone(), (**a).clone()));
                Some(Term::lambda(&x, (**a).clone(), self.leaf(b, &env2)?))
            }
        }
    }

    /// A term of type `ty` whose free identifiers come from `env`.
    pub fn term(&mut self, ty: &Type, env: &[(String, Type)], depth: usize) -> Option<Term> {
        if let Type::Arrow(a, b) = ty {
            let x = self.fresh("u");
            let mut env2 = env.to_vec();
            env2.push((x.clone(), (**a).clone()));
            return Some(Term::lambda(&x, (**a).clone(), self.term(b, &env2, depth)?));
        }
        if depth == 0 {
            return self.leaf(ty, env);
        }
        let d = depth - 1;
        let mut pick = self.rng.gen_range(0..10);
        if self.first_order && matches!(pick, 0 | 4) {
            pick = 3;
        }
        if pick == 0 {
            if let Some(t) = self.call(ty, env, depth) {
                return Some(t);
            }
        }
        let nat_or_leaf = |g: &mut TermGen| g.term(&Type::Nat, env, d);
        match (ty, pick) {
            (_, 1) => {
                let z = self.fresh("l");
                let mut env2 = env.to_vec();
                env2.push((z.clone(), Type::Var));
                let body_ty = if *ty == Type::Var { Type::Comm } else { ty.clone() };
                let body = self.term(&body_ty, &env2, d)?;
                let t = Term::new_var(&z, body);
                Some(if *ty == Type::Var { Term::seq(t, self.leaf(ty, env)?) } else { t })
            }
            (_, 2) => Some(Term::ifzero(nat_or_leaf(self)?, self.term(ty, env, d)?, self.term(ty, env, d)?)),
            (_, 3) => Some(Term::seq(self.term(&Type::Comm, env, d)?, self.term(ty, env, d)?)),
            (_, 4) => {
                // A redex nested inside the term.
                let a: Type = sci_core::syntax::parse_type(ARG_TYPES.choose(&mut self.rng).unwrap()).unwrap();
                let (l, r) = self.split(env);
                let x = self.fresh("p");
                let mut envl = l;
                envl.push((x.clone(), a.clone()));
                let body = self.term(ty, &envl, d)?;
                Some(Term::app(Term::lambda(&x, a.clone(), body), self.term(&a, &r, d)?))
            }
            (Type::Comm, 5) => {
                let v = self.leaf(&Type::Var, env)?;
                Some(Term::assign(v, nat_or_leaf(self)?))
            }
            (Type::Comm, 6) => {
                let v = self.leaf(&Type::Var, env)?;
                // Bounded loops: count the variable down to zero.
                let guard = Term::bin(BinOp::Eq, Term::deref(v.clone()), Term::Num(0));
                let step = Term::assign(v.clone(), Term::bin(BinOp::Monus, Term::deref(v), Term::Num(1)));
                Some(Term::while_(guard, step))
            }
            (Type::Nat, 5 | 6) => {
                let op = *[BinOp::Add, BinOp::Monus, BinOp::Eq, BinOp::Lt, BinOp::Mod].choose(&mut self.rng).unwrap();
                Some(Term::bin(op, nat_or_leaf(self)?, nat_or_leaf(self)?))
            }
            (Type::Nat, 7) => Some(Term::un(UnOp::Even, nat_or_leaf(self)?)),
            (Type::Var, 5) if !self.first_order => {
                let v = self.fresh("n");
                let w = self.term(&Type::Comm, &[env.to_vec(), vec![(v.clone(), Type::Nat)]].concat(), d)?;
                Some(Term::mkvar(Term::lambda(&v, Type::Nat, w), nat_or_leaf(self)?))
            }
            _ => self.leaf(ty, env),
        }
    }

    /// A ground term in `x:var, y:var`.
    pub fn ground(&mut self, depth: usize) -> (Context, Term, Type) {
        let env: Vec<(String, Type)> = vec![("x".into(), Type::Var), ("y".into(), Type::Var)];
        loop {
            let ty = [Type::Comm, Type::Nat, Type::Var].choose(&mut self.rng).unwrap().clone();
            let Some(m) = self.term(&ty, &env, depth) else { continue };
            let ctx = Context::vars(&["x", "y"]);
            if infer(&ctx, &m).map(|v| v.ty) == Ok(ty.clone()) {
                return (ctx, m, ty);
            }
        }
    }

    /// A well-typed redex `(λp:A. M) N` of ground type in `x:var, y:var`.
    pub fn redex(&mut self) -> (Context, Term, Type) {
        loop {
            let a: Type = sci_core::syntax::parse_type(ARG_TYPES.choose(&mut self.rng).unwrap()).unwrap();
            let b = if self.rng.gen_bool(0.6) { Type::Comm } else { Type::Nat };
            let env: Vec<(String, Type)> = vec![("x".into(), Type::Var), ("y".into(), Type::Var)];
            let (l, r) = self.split(&env);
            let p = self.fresh("p");
            let mut envl = l;
            envl.push((p.clone(), a.clone()));
            let (Some(body), Some(arg)) = (self.term(&b, &envl, 2), self.term(&a, &r, 2)) else { continue };
            if !body.free_vars().contains(&p) {
                continue;
            }
            let m = Term::app(Term::lambda(&p, a.clone(), body), arg);
            let ctx = Context::vars(&["x", "y"]);
            if infer(&ctx, &m).map(|v| v.ty) == Ok(b.clone()) && m.size() <= 40 {
                return (ctx, m, b);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Bottom-up reference semantics.

type Elem = (Vec<Trace>, Event);

fn concat(a: &[Trace], b: &[Trace], cap: usize) -> Option<Vec<Trace>> {
    let out: Vec<Trace> = a.iter().zip(b).map(|(s, t)| s.iter().chain(t).cloned().collect()).collect();
    out.iter().all(|s: &Trace| s.len() <= cap).then_some(out)
}

fn nats(set: &BTreeSet<Elem>) -> impl Iterator<Item = (&Vec<Trace>, u64)> {
    set.iter().filter_map(|(s, e)| if let Event::Nat(n) = e { Some((s, *n)) } else { None })
}

/// Builds the denotation of a first-order term from the denotations of
/// its parts, each context trace cut at `max_trace_len`. Returns `None`
/// for functions, applications and bad variables.
pub fn reference_denotation(ctx: &Context, m: &Term, bounds: &Bounds) -> Option<BTreeSet<TraceTuple>> {
    let set = reference(ctx, m, bounds)?;
    Some(set.into_iter().map(|(s, e)| TraceTuple::new(s, e)).collect())
}

fn reference(ctx: &Context, m: &Term, b: &Bounds) -> Option<BTreeSet<Elem>> {
    let cap = b.max_trace_len;
    let k = ctx.len();
    let empty = || vec![Vec::new(); k];
    let pairs = |x: &BTreeSet<Elem>, y: &BTreeSet<Elem>, f: &dyn Fn(&Event, &Event) -> Option<Event>| {
        let mut out = BTreeSet::new();
        for (s, e1) in x {
            for (t, e2) in y {
                if let (Some(u), Some(e)) = (concat(s, t, cap), f(e1, e2)) {
                    out.insert((u, e));
                }
            }
        }
        out
    };
    Some(match m {
        Term::Num(n) => BTreeSet::from([(empty(), Event::Nat(*n))]),
        Term::Skip => BTreeSet::from([(empty(), Event::Star)]),
        Term::Random => (0..=b.random_max()).map(|n| (empty(), Event::Nat(n))).collect(),
        Term::Ident(x) => {
            let i = ctx.position(x)?;
            let ty = ctx.lookup(x)?;
            if !ty.is_base() || cap == 0 {
                return if ty.is_base() { Some(BTreeSet::new()) } else { None };
            }
            alphabet(ty, b)
                .into_iter()
                .map(|e| {
                    let mut s = empty();
                    s[i] = vec![e.clone()];
                    (s, e)
                })
                .collect()
        }
        Term::Bin(op, l, r) => {
            let (l, r) = (reference(ctx, l, b)?, reference(ctx, r, b)?);
            pairs(&l, &r, &|a, c| match (a, c) {
                (Event::Nat(x), Event::Nat(y)) => op.apply(*x, *y).map(Event::Nat),
                _ => None,
            })
        }
        Term::Un(op, a) => nats(&reference(ctx, a, b)?).map(|(s, n)| (s.clone(), Event::Nat(op.apply(n)))).collect(),
        Term::Seq(l, r) => {
            let (l, r) = (reference(ctx, l, b)?, reference(ctx, r, b)?);
            pairs(&l, &r, &|a, c| (*a == Event::Star).then(|| c.clone()))
        }
        Term::Assign(target, value) => {
            let (v, t) = (reference(ctx, value, b)?, reference(ctx, target, b)?);
            pairs(&v, &t, &|a, c| match (a, c) {
                (Event::Nat(n), Event::Write(w)) if n == w => Some(Event::Star),
                _ => None,
            })
        }
        Term::Deref(a) => reference(ctx, a, b)?
            .into_iter()
            .filter_map(|(s, e)| if let Event::Read(n) = e { Some((s, Event::Nat(n))) } else { None })
            .collect(),
        Term::IfZero(g, t, e) => {
            let (g, t, e) = (reference(ctx, g, b)?, reference(ctx, t, b)?, reference(ctx, e, b)?);
            let mut out = BTreeSet::new();
            for (s, n) in nats(&g) {
                for (u, v) in if n == 0 { &t } else { &e } {
                    if let Some(w) = concat(s, u, cap) {
                        out.insert((w, v.clone()));
                    }
                }
            }
            out
        }
        Term::While(g, body) => {
            let (g, body) = (reference(ctx, g, b)?, reference(ctx, body, b)?);
            let mut out = BTreeSet::new();
            let mut frontier: BTreeSet<Vec<Trace>> = BTreeSet::from([empty()]);
            for round in 0..=b.max_while_unfold {
                let mut next = BTreeSet::new();
                for pre in &frontier {
                    for (s, n) in nats(&g) {
                        let Some(u) = concat(pre, s, cap) else { continue };
                        if n != 0 {
                            out.insert((u, Event::Star));
                        } else if round < b.max_while_unfold {
                            for (t, e) in &body {
                                if *e == Event::Star {
                                    if let Some(w) = concat(&u, t, cap) {
                                        next.insert(w);
                                    }
                                }
                            }
                        }
                    }
                }
                frontier = next;
            }
            out
        }
        Term::New(x, body) => {
            let inner = ctx.clone().with(x, Type::Var);
            let pos = inner.position(x)?;
            let shadowed = ctx.position(x);
            reference(&inner, body, b)?
                .into_iter()
                .filter(|(s, _)| is_cell_trace(&s[pos]))
                .map(|(mut s, e)| {
                    s.remove(pos);
                    if let Some(i) = shadowed {
                        s.insert(i, Vec::new());
                    }
                    (s, e)
                })
                .collect()
        }
        Term::Lambda(..) | Term::App(..) | Term::Mkvar(..) | Term::Hole => return None,
    })
}

/// Whether the reference semantics should agree exactly with the engine:
/// no local blocks (their cells are cut by the trace bound here but not
/// there) and no values that can grow past `max_nat`.
pub fn in_exact_fragment(m: &Term, max_nat: u64) -> bool {
    !m.any(&|t| match t {
        Term::New(..) | Term::Lambda(..) | Term::App(..) | Term::Mkvar(..) => true,
        Term::Num(n) => *n > max_nat,
        Term::Bin(op, ..) => matches!(op, BinOp::Add | BinOp::Mul | BinOp::Pair),
        Term::Un(op, _) => matches!(op, UnOp::Fst | UnOp::Snd),
        _ => false,
    })
}
