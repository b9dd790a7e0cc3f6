//! Terms that test for, and produce, a given trace.

use std::collections::{BTreeMap, BTreeSet};

use crate::bounds::Bounds;
use crate::denotational::{denote, denote_from_store, DenoteError};
use crate::events::{leq_minus, leq_plus, traces, Event, Store, Trace};
use crate::syntax::{fresh_name, rename_free, BinOp, Context, Term, Type};

/// A term together with the stores it runs between.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProduceSpec {
    /// Variables only.
    pub ctx: Context,
    pub term: Term,
    pub init: Store,
    pub fin: Store,
}

impl ProduceSpec {
    fn names(&self) -> BTreeSet<String> {
        self.ctx.names().map(str::to_string).collect()
    }

    /// Renames the context variables away from `avoid`.
    fn rename_apart(self, avoid: &BTreeSet<String>) -> ProduceSpec {
        let mut taken: BTreeSet<String> = avoid.iter().cloned().chain(self.names()).collect();
        let mut pairs = Vec::new();
        for n in self.ctx.names() {
            if avoid.contains(n) {
                let f = fresh_name(n, &taken);
                taken.insert(f.clone());
                pairs.push((n.to_string(), f));
            }
        }
        let map = |s: &Store| -> Store {
            s.iter()
                .map(|(k, v)| (pairs.iter().find(|(a, _)| a == k).map_or(k.clone(), |(_, b)| b.clone()), *v))
                .collect()
        };
        let ctx = Context::vars(
            &self
                .ctx
                .names()
                .map(|n| pairs.iter().find(|(a, _)| a == n).map_or(n, |(_, b)| b.as_str()))
                .collect::<Vec<_>>(),
        );
        ProduceSpec { term: rename_free(&self.term, &pairs), init: map(&self.init), fin: map(&self.fin), ctx }
    }
}

fn store(pairs: &[(&str, u64)]) -> Store {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn eq(a: Term, n: u64) -> Term {
    Term::bin(BinOp::Eq, a, Term::Num(n))
}

fn deref(x: &str) -> Term {
    Term::deref(Term::ident(x))
}

fn incr(x: &str) -> Term {
    Term::assign(Term::ident(x), Term::bin(BinOp::Add, deref(x), Term::Num(1)))
}

/// `x1 := v1; ...; xn := vn`
fn set(s: &Store) -> Term {
    Term::seq_all(s.iter().map(|(k, v)| Term::assign(Term::ident(k), Term::Num(*v))))
}

/// Diverges unless every variable holds its value in `s`.
fn check(s: &Store) -> Term {
    s.iter().rev().fold(Term::Skip, |acc, (k, v)| Term::if_(eq(deref(k), *v), acc, Term::diverge()))
}

/// A divergent term of base type `b`; `var` needs some variable `v`.
fn diverge_base(b: &Type, v: Option<&str>) -> Term {
    match b {
        Type::Comm => Term::diverge(),
        Type::Nat => Term::seq(Term::diverge(), Term::Num(0)),
        _ => Term::seq(Term::diverge(), Term::ident(v.unwrap_or("x"))),
    }
}

fn all_names(ts: &[&Term]) -> BTreeSet<String> {
    ts.iter().flat_map(|t| t.all_names()).collect()
}

/// A closed-up command that converges exactly against a `subject` whose
/// trace is at least `s` in the negative read/write order.
pub fn test_term(ty: &Type, s: &[Event], subject: &str) -> Term {
    Term::seq_all(s.iter().map(|e| test_event(ty, e, subject)))
}

fn test_event(ty: &Type, e: &Event, x: &str) -> Term {
    match (ty, e) {
        (Type::Comm, _) => Term::ident(x),
        (Type::Nat, Event::Nat(n)) => Term::if_(eq(Term::ident(x), *n), Term::Skip, Term::diverge()),
        (Type::Var, Event::Write(n)) => Term::assign(Term::ident(x), Term::Num(*n)),
        (Type::Var, Event::Read(n)) => Term::if_(eq(deref(x), *n), Term::Skip, Term::diverge()),
        (Type::Arrow(a, b), Event::Fun(s, out)) => {
            let z0 = "z".to_string();
            let inner_probe = test_event(b, out, &z0);
            let mut avoid: BTreeSet<String> = inner_probe.all_names();
            avoid.insert(x.to_string());
            let p = produce_term(a, s).rename_apart(&avoid);
            let mut taken = avoid.clone();
            taken.extend(p.names());
            taken.extend(p.term.all_names());
            taken.remove(&z0);
            let z = fresh_name(&z0, &taken);
            let probe = test_event(b, out, &z);
            let call = Term::app(Term::lambda(&z, (**b).clone(), probe), Term::app(Term::ident(x), p.term));
            let body = Term::seq_all([set(&p.init), call, check(&p.fin)]);
            p.ctx.names().rev().fold(body, |acc, v| Term::new_var(v, acc))
        }
        _ => Term::diverge(),
    }
}

/// A term that can perform `s` from its initial store to its final store,
/// and only traces above `s` in the positive read/write order.
pub fn produce_term(ty: &Type, s: &[Event]) -> ProduceSpec {
    match s {
        [] => produce_nothing(ty),
        [e] => produce_event(ty, e),
        _ => produce_sequence(ty, s),
    }
}

fn produce_nothing(ty: &Type) -> ProduceSpec {
    let (args, base) = ty.uncurry();
    let (ctx, st) = if base == Type::Var { (Context::vars(&["x"]), store(&[("x", 0)])) } else { (Context::new(), Store::new()) };
    let mut body = diverge_base(&base, Some("x"));
    for (i, a) in args.iter().enumerate().rev() {
        body = Term::lambda(&format!("u{i}"), a.clone(), body);
    }
    ProduceSpec { ctx, term: body, init: st.clone(), fin: st }
}

fn produce_event(ty: &Type, e: &Event) -> ProduceSpec {
    let y_step = incr("y");
    match (ty, e) {
        (Type::Comm, _) => ProduceSpec {
            ctx: Context::vars(&["y"]),
            term: y_step,
            init: store(&[("y", 0)]),
            fin: store(&[("y", 1)]),
        },
        (Type::Nat, Event::Nat(n)) => ProduceSpec {
            ctx: Context::vars(&["y"]),
            term: Term::seq(y_step, Term::Num(*n)),
            init: store(&[("y", 0)]),
            fin: store(&[("y", 1)]),
        },
        (Type::Var, Event::Write(n) | Event::Read(n)) => {
            let start = if matches!(e, Event::Write(_)) { n + 1 } else { *n };
            ProduceSpec {
                ctx: Context::vars(&["x", "y"]),
                term: Term::seq(y_step, Term::ident("x")),
                init: store(&[("x", start), ("y", 0)]),
                fin: store(&[("x", *n), ("y", 1)]),
            }
        }
        (Type::Arrow(a, b), Event::Fun(s, out)) => {
            let pb = produce_event(b, out);
            let (rest, _) = b.uncurry();
            let mut taken = pb.names();
            taken.extend(pb.term.all_names());
            let z = fresh_name("z", &taken);
            taken.insert(z.clone());
            let ws: Vec<String> = rest
                .iter()
                .map(|_| {
                    let w = fresh_name("w", &taken);
                    taken.insert(w.clone());
                    w
                })
                .collect();
            let applied = ws.iter().fold(pb.term.clone(), |f, w| Term::app(f, Term::ident(w)));
            let mut body = Term::seq(test_term(a, s, &z), applied);
            for (w, t) in ws.iter().zip(&rest).rev() {
                body = Term::lambda(w, t.clone(), body);
            }
            ProduceSpec { term: Term::lambda(&z, (**a).clone(), body), ..pb }
        }
        _ => produce_nothing(ty),
    }
}

fn produce_sequence(ty: &Type, s: &[Event]) -> ProduceSpec {
    let parts: Vec<ProduceSpec> = s.iter().map(|e| produce_event(ty, e)).collect();
    let names = parts[0].names();
    debug_assert!(parts.iter().all(|p| p.names() == names));
    let (args, base) = ty.uncurry();
    let mut taken: BTreeSet<String> = names.clone();
    taken.extend(all_names(&parts.iter().map(|p| &p.term).collect::<Vec<_>>()));
    let c = fresh_name("c", &taken);
    taken.insert(c.clone());
    let ys: Vec<String> = args
        .iter()
        .map(|_| {
            let y = fresh_name("a", &taken);
            taken.insert(y.clone());
            y
        })
        .collect();
    let apply = |t: &Term| ys.iter().fold(t.clone(), |f, y| Term::app(f, Term::ident(y)));
    let var_name = names.iter().next().map(String::as_str);
    let mut chain = diverge_base(&base, var_name);
    for (i, p) in parts.iter().enumerate().rev() {
        let branch = if i == 0 {
            apply(&p.term)
        } else {
            Term::seq_all([check(&parts[i - 1].fin), set(&p.init), apply(&p.term)])
        };
        chain = Term::if_(eq(deref(&c), i as u64 + 1), branch, chain);
    }
    let mut body = Term::seq(incr(&c), chain);
    for (y, a) in ys.iter().zip(&args).rev() {
        body = Term::lambda(y, a.clone(), body);
    }
    let mut ctx_names: Vec<&str> = names.iter().map(String::as_str).collect();
    ctx_names.push(&c);
    let mut init = parts[0].init.clone();
    init.insert(c.clone(), 0);
    let mut fin = parts[parts.len() - 1].fin.clone();
    fin.insert(c.clone(), s.len() as u64);
    ProduceSpec { ctx: Context::vars(&ctx_names), term: body, init, fin }
}

/// Outcome of comparing a characterization with the read/write order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CharacterizationReport {
    /// Traces accepted by the term but outside the order.
    pub unexpected: Vec<Trace>,
    /// Traces in the order that the term does not accept.
    pub missing: Vec<Trace>,
    pub checked: usize,
}

impl CharacterizationReport {
    pub fn holds(&self) -> bool {
        self.unexpected.is_empty() && self.missing.is_empty()
    }
}

/// `(s, *)` is in the denotation of `test(act)` exactly when `act <=- s`.
pub fn check_test_characterization(ty: &Type, act: &[Event], bounds: &Bounds) -> Result<CharacterizationReport, DenoteError> {
    let m = test_term(ty, act, "x");
    let d = denote(&Context::new().with("x", ty.clone()), &m, &Type::Comm, bounds)?;
    let accepted: BTreeSet<Trace> = d.elems.iter().map(|t| t.inputs[0].clone()).collect();
    let mut r = CharacterizationReport::default();
    for s in &accepted {
        if !leq_minus(ty, act, s) {
            r.unexpected.push(s.clone());
        }
    }
    for s in traces(ty, bounds, bounds.max_trace_len) {
        r.checked += 1;
        if leq_minus(ty, act, &s) && !accepted.contains(&s) {
            r.missing.push(s);
        }
    }
    Ok(r)
}

/// Some run of `produce(act)` from its initial to its final store outputs
/// `a` exactly when `act <=+ a`, for every bounded trace `a`.
pub fn check_produce_characterization(
    ty: &Type,
    act: &[Event],
    bounds: &Bounds,
) -> Result<CharacterizationReport, DenoteError> {
    let p = produce_term(ty, act);
    let mut memo: BTreeMap<Store, Vec<(Event, Store)>> = BTreeMap::new();
    let mut step = |sigma: &Store| -> Result<Vec<(Event, Store)>, DenoteError> {
        if let Some(v) = memo.get(sigma) {
            return Ok(v.clone());
        }
        let g = denote_from_store(&p.ctx, &p.term, ty, sigma, bounds)?;
        let v: Vec<(Event, Store)> = g.results.into_iter().map(|(t, s)| (t.out, s)).collect();
        memo.insert(sigma.clone(), v.clone());
        Ok(v)
    };
    let mut r = CharacterizationReport::default();
    for a in traces(ty, bounds, bounds.max_trace_len) {
        r.checked += 1;
        let mut reach: BTreeSet<Store> = BTreeSet::from([p.init.clone()]);
        for e in &a {
            let mut next = BTreeSet::new();
            for sigma in &reach {
                for (out, after) in step(sigma)? {
                    if &out == e {
                        next.insert(after);
                    }
                }
            }
            reach = next;
        }
        let produced = reach.contains(&p.fin);
        let expected = leq_plus(ty, act, &a);
        if produced && !expected {
            r.unexpected.push(a);
        } else if expected && !produced {
            r.missing.push(a);
        }
    }
    Ok(r)
}
