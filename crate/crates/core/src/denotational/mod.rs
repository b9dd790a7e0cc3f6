//! Bounded trace-relation denotations.
//!
//! An element `(s1 .. sn, b)` says the term can produce the event `b`
//! while its context identifiers perform the traces `s1 .. sn`.
//!
//! Enumeration limits apply to the environment's choices: the naturals it
//! supplies, how long context traces and argument traces get, and how many
//! values `random` may draw. Naturals computed by the term itself are
//! not capped, and every loop instance may run its body at most
//! `max_while_unfold` times.

mod engine;
pub mod monrel;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::bounds::Bounds;
use crate::events::{Event, Store, Trace, TraceDisplay};
use crate::syntax::{Context, Term, Type};
use crate::typecheck::{check, TypeError};

use engine::{extend, Binding, Buf, Engine, Env, St};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DenoteError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("arithmetic overflow")]
    Overflow,
    #[error("internal error: {0}")]
    Internal(String),
}

/// One element of a denotation: a trace per context entry and an output event.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TraceTuple {
    pub inputs: Vec<Trace>,
    pub out: Event,
}

impl TraceTuple {
    pub fn new(inputs: Vec<Trace>, out: Event) -> TraceTuple {
        TraceTuple { inputs, out }
    }

    /// Largest natural anywhere in the tuple.
    pub fn max_nat(&self) -> u64 {
        self.inputs.iter().flatten().map(Event::max_nat).max().unwrap_or(0).max(self.out.max_nat())
    }
}

impl std::fmt::Display for TraceTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for s in &self.inputs {
            write!(f, "[{}], ", TraceDisplay(s))?;
        }
        write!(f, "{})", self.out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Denotation {
    pub ctx: Context,
    pub ty: Type,
    pub elems: BTreeSet<TraceTuple>,
    pub bounds: Bounds,
}

impl Denotation {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, t: &TraceTuple) -> bool {
        self.elems.contains(t)
    }

    /// Elements whose naturals are all at most `max_nat`.
    pub fn restricted_to(&self, max_nat: u64) -> BTreeSet<TraceTuple> {
        self.elems.iter().filter(|t| t.max_nat() <= max_nat).cloned().collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "ctx": self.ctx.entries().iter().map(|(n, t)| json!({ "name": n, "type": t.to_string() })).collect::<Vec<_>>(),
            "type": self.ty.to_string(),
            "bounds": self.bounds,
            "elems": self.elems,
        })
    }
}

fn context_state(ctx: &Context, limit: usize) -> St {
    St { bufs: ctx.types().map(|_| Buf { trace: vec![], limit }).collect(), cells: vec![] }
}

fn context_env<'a>(ctx: &'a Context) -> Env<'a> {
    let mut env = None;
    for (i, (name, ty)) in ctx.entries().iter().enumerate() {
        env = extend(&env, name, Binding::Env { buf: i, ty: ty.clone() });
    }
    env
}

/// The bounded denotation of `ctx |- m : ty`.
pub fn denote(ctx: &Context, m: &Term, ty: &Type, bounds: &Bounds) -> Result<Denotation, DenoteError> {
    check(ctx, m, ty)?;
    let engine = Engine::new(*bounds);
    let env = context_env(ctx);
    let st0 = context_state(ctx, bounds.max_trace_len);
    let mut elems = BTreeSet::new();
    for shape in engine.shapes(ty) {
        let mut st = st0.clone();
        let q = engine.instantiate(&shape, &mut st);
        for (ans, st2) in engine.run(m, &env, &q, st)? {
            let out = engine.event_of(&q, ans, &st2)?;
            let inputs = st2.bufs[..ctx.len()].iter().map(|b| b.trace.clone()).collect();
            elems.insert(TraceTuple { inputs, out });
        }
    }
    Ok(Denotation { ctx: ctx.clone(), ty: ty.clone(), elems, bounds: *bounds })
}

/// Infers the type, then denotes.
pub fn denote_inferred(ctx: &Context, m: &Term, bounds: &Bounds) -> Result<Denotation, DenoteError> {
    let ty = crate::typecheck::infer(ctx, m)?.ty;
    denote(ctx, m, &ty, bounds)
}

/// Pairs of context traces and output words produced by asking `m`
/// exactly `len` questions in a row. `len = 1` gives the denotation.
pub fn denote_words(
    ctx: &Context,
    m: &Term,
    ty: &Type,
    bounds: &Bounds,
    len: usize,
) -> Result<BTreeSet<(Vec<Trace>, Trace)>, DenoteError> {
    check(ctx, m, ty)?;
    let engine = Engine::new(*bounds);
    let env = context_env(ctx);
    let shapes = engine.shapes(ty);
    let mut partial: Vec<(Trace, St)> = vec![(vec![], context_state(ctx, bounds.max_trace_len))];
    for _ in 0..len {
        let mut next = Vec::new();
        for (word, st) in partial {
            for shape in &shapes {
                let mut st1 = st.clone();
                let q = engine.instantiate(shape, &mut st1);
                for (ans, st2) in engine.run(m, &env, &q, st1)? {
                    let mut w = word.clone();
                    w.push(engine.event_of(&q, ans, &st2)?);
                    next.push((w, st2));
                }
            }
        }
        partial = next;
    }
    Ok(partial
        .into_iter()
        .map(|(w, st)| (st.bufs[..ctx.len()].iter().map(|b| b.trace.clone()).collect(), w))
        .collect())
}

/// Elements of the denotation that a store can actually realise.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GuidedRun {
    /// Each element together with the store it leaves behind.
    pub results: BTreeSet<(TraceTuple, Store)>,
    /// Some branch was cut by the loop-unfolding limit.
    pub truncated: bool,
}

/// Runs `ctx |- m : ty` with the context variables held in real cells
/// initialised from `sigma`, recording their traces. Trace lengths are not
/// capped; loops still are.
pub fn denote_from_store(
    ctx: &Context,
    m: &Term,
    ty: &Type,
    sigma: &Store,
    bounds: &Bounds,
) -> Result<GuidedRun, DenoteError> {
    check(ctx, m, ty)?;
    if !ctx.all_var() {
        return Err(DenoteError::Precondition("store-guided runs need a context of variables".into()));
    }
    let mut init = Vec::new();
    for name in ctx.names() {
        match sigma.get(name) {
            Some(v) => init.push(*v),
            None => return Err(DenoteError::Precondition(format!("store lacks `{name}`"))),
        }
    }
    let engine = Engine::new(*bounds);
    let mut env = None;
    for (i, name) in ctx.names().enumerate() {
        env = extend(&env, name, Binding::Tracked { buf: i, cell: i });
    }
    let st0 = St { bufs: vec![Buf { trace: vec![], limit: usize::MAX }; ctx.len()], cells: init };
    let mut results = BTreeSet::new();
    for shape in engine.shapes(ty) {
        let mut st = st0.clone();
        let q = engine.instantiate(&shape, &mut st);
        for (ans, st2) in engine.run(m, &env, &q, st)? {
            let out = engine.event_of(&q, ans, &st2)?;
            let inputs = st2.bufs[..ctx.len()].iter().map(|b| b.trace.clone()).collect();
            let mut after = sigma.clone();
            for (i, name) in ctx.names().enumerate() {
                after.insert(name.to_string(), st2.cells[i]);
            }
            results.insert((TraceTuple { inputs, out }, after));
        }
    }
    Ok(GuidedRun { results, truncated: engine.truncated.get() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::parse_trace;
    use crate::syntax::{parse_judgment, parse_term};

    fn den(src: &str, b: &Bounds) -> Denotation {
        let (ctx, m) = parse_judgment(src).unwrap();
        denote_inferred(&ctx, &m, b).unwrap()
    }

    fn tuple(ins: &[&str], out: &str) -> TraceTuple {
        TraceTuple::new(ins.iter().map(|s| parse_trace(s).unwrap()).collect(), out.parse().unwrap())
    }

    #[test]
    fn identity_on_var() {
        let d = den("x:var |- x", &Bounds::new(1, 2, 2));
        let want: BTreeSet<_> =
            ["R(0)", "R(1)", "W(0)", "W(1)"].iter().map(|e| tuple(&[e], e)).collect();
        assert_eq!(d.elems, want);
    }

    #[test]
    fn swap_with_local_temporary() {
        let d = den("x:var, y:var |- new z in z := !x; x := !y; y := !z", &Bounds::new(1, 2, 2));
        let mut want = BTreeSet::new();
        for n in 0..2 {
            for m in 0..2 {
                want.insert(tuple(&[&format!("R({n}) W({m})"), &format!("R({m}) W({n})")], "*"));
            }
        }
        assert_eq!(d.elems, want);
    }

    #[test]
    fn while_includes_zero_iterations() {
        let d = den("x:var |- while !x do x := 1", &Bounds::new(1, 3, 2));
        assert!(d.contains(&tuple(&["R(1)"], "*")));
        assert!(d.contains(&tuple(&["R(0) W(1) R(1)"], "*")));
        assert!(!d.contains(&tuple(&["R(0) W(1) R(0)"], "*")));
    }

    #[test]
    fn random_draws_every_value() {
        let d = den("random", &Bounds::new(2, 2, 2));
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn mkvar_denotation() {
        let d = den("x:var |- mkvar(lambda n:nat. x := n + 1, 4)", &Bounds::new(1, 2, 2));
        assert!(d.contains(&tuple(&["W(1)"], "W(0)")));
        assert!(d.contains(&tuple(&["W(2)"], "W(1)")));
        assert!(d.contains(&tuple(&[""], "R(4)")));
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn application_of_context_function() {
        // The environment may use the argument up to twice.
        let d = den("f:comm -o comm, x:var |- f (x := 1)", &Bounds::new(1, 2, 2));
        assert!(d.contains(&tuple(&["(, *)", ""], "*")));
        assert!(d.contains(&tuple(&["(* *, *)", "W(1) W(1)"], "*")));
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn function_output() {
        let d = den("lambda c:comm. c; c", &Bounds::new(1, 2, 2));
        assert_eq!(d.elems, BTreeSet::from([tuple(&[], "(* *, *)")]));
        let d = den("lambda c:comm. c; c; c", &Bounds::new(1, 2, 2));
        assert!(d.is_empty());
    }

    #[test]
    fn guided_run_threads_the_store() {
        let (ctx, m) = parse_judgment("x:var |- x := !x + 1; x := !x + 1").unwrap();
        let sigma: Store = [("x".to_string(), 1)].into();
        let g = denote_from_store(&ctx, &m, &Type::Comm, &sigma, &Bounds::default()).unwrap();
        let (t, after) = g.results.iter().next().unwrap();
        assert_eq!(g.results.len(), 1);
        assert_eq!(t, &tuple(&["R(1) W(2) R(2) W(3)"], "*"));
        assert_eq!(after["x"], 3);
    }

    #[test]
    fn words_concatenate_traces() {
        let (ctx, m) = parse_judgment("x:var |- x := !x").unwrap();
        let w = denote_words(&ctx, &m, &Type::Comm, &Bounds::new(1, 4, 2), 2).unwrap();
        assert!(w.contains(&(vec![parse_trace("R(0) W(0) R(1) W(1)").unwrap()], parse_trace("* *").unwrap())));
    }

    #[test]
    fn rejects_ill_typed() {
        let m = parse_term("new x in x").unwrap();
        assert!(denote(&Context::new(), &m, &Type::Var, &Bounds::default()).is_err());
    }

    #[test]
    fn json_shape() {
        let d = den("x:var |- x := 1", &Bounds::new(1, 2, 2));
        let j = d.to_json();
        assert_eq!(j["ctx"][0]["type"], "var");
        assert_eq!(j["type"], "comm");
        assert_eq!(j["elems"][0]["inputs"][0][0], "W(1)");
        assert_eq!(j["bounds"]["maxNat"], 1);
    }
}
