//! Contexts that tell two terms apart, run through the evaluator.

use std::collections::BTreeSet;

use crate::bounds::Bounds;
use crate::denotational::{denote, TraceTuple};
use crate::events::{leq_minus_event, Event, Store, Trace};
use crate::operational::{eval, EvalOutcome};
use crate::syntax::{fresh_name, plug, BinOp, Context, Term, Type};
use crate::typecheck::infer;
use crate::universal::test_term;

use super::AnalysisError;

/// A context with a hole and what happens when each term is put in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationOutcome {
    pub context: Term,
    pub left: EvalOutcome,
    pub right: EvalOutcome,
}

impl SeparationOutcome {
    /// Exactly one side converges and the other produced nothing.
    pub fn separates(&self) -> bool {
        self.left.converges() != self.right.converges()
    }
}

fn eq(a: Term, n: u64) -> Term {
    Term::bin(BinOp::Eq, a, Term::Num(n))
}

fn deref(x: &str) -> Term {
    Term::deref(Term::ident(x))
}

fn tick(k: &str) -> Term {
    Term::assign(Term::ident(k), Term::bin(BinOp::Add, deref(k), Term::Num(1)))
}

/// `if !k = i+1 then step_i else ... else fallback` over the chosen steps.
fn dispatch(k: &str, steps: Vec<(usize, Term)>, fallback: Term) -> Term {
    steps.into_iter().rev().fold(fallback, |acc, (i, t)| Term::if_(eq(deref(k), i as u64 + 1), t, acc))
}

/// A stand-in for an identifier of ground type that performs the trace `s`
/// step by step and diverges on any other use. `k` counts uses.
fn replay(ty: &Type, s: &[Event], k: &str, avoid: &BTreeSet<String>) -> Result<Term, AnalysisError> {
    let steps = |f: &dyn Fn(&Event) -> Option<Term>| -> Vec<(usize, Term)> {
        s.iter().enumerate().filter_map(|(i, e)| f(e).map(|t| (i, t))).collect()
    };
    Ok(match ty {
        Type::Comm => Term::seq(tick(k), Term::if_(Term::bin(BinOp::Lt, Term::Num(s.len() as u64), deref(k)), Term::diverge(), Term::Skip)),
        Type::Nat => {
            let chain = dispatch(k, steps(&|e| if let Event::Nat(n) = e { Some(Term::Num(*n)) } else { None }), Term::seq(Term::diverge(), Term::Num(0)));
            Term::seq(tick(k), chain)
        }
        Type::Var => {
            let arg = fresh_name("n", avoid);
            let writes = steps(&|e| match e {
                Event::Write(v) => Some(Term::if_(eq(Term::ident(&arg), *v), Term::Skip, Term::diverge())),
                _ => None,
            });
            let reads = steps(&|e| if let Event::Read(v) = e { Some(Term::Num(*v)) } else { None });
            let writer = Term::lambda(&arg, Type::Nat, Term::seq(tick(k), dispatch(k, writes, Term::diverge())));
            let reader = Term::seq(tick(k), dispatch(k, reads, Term::seq(Term::diverge(), Term::Num(0))));
            Term::mkvar(writer, reader)
        }
        t => return Err(AnalysisError::Precondition(format!("replay needs a ground context entry, not {t}"))),
    })
}

/// Builds the context
/// `new k1 in ... (λx1...xn.[-]) R1 ... Rn; check` of type `comm`
/// where each `Ri` replays the witness trace of `xi` and the check insists
/// that every trace was used up and the output matched.
pub fn mkvar_separation_context(
    ctx: &Context,
    witness: &TraceTuple,
    ty: &Type,
    avoid: &BTreeSet<String>,
) -> Result<Term, AnalysisError> {
    if witness.inputs.len() != ctx.len() {
        return Err(AnalysisError::Precondition("witness does not match the context".into()));
    }
    let mut taken: BTreeSet<String> = avoid.iter().cloned().chain(ctx.names().map(str::to_string)).collect();
    let mut counters = Vec::new();
    let mut args = Vec::new();
    for ((_, t), s) in ctx.entries().iter().zip(&witness.inputs) {
        let k = fresh_name("k", &taken);
        taken.insert(k.clone());
        args.push(replay(t, s, &k, &taken)?);
        counters.push((k, s.len() as u64));
    }
    let f = ctx.entries().iter().rev().fold(Term::Hole, |acc, (x, t)| Term::lambda(x, t.clone(), acc));
    let applied = args.into_iter().fold(f, Term::app);
    let done = counters.iter().rev().fold(Term::Skip, |acc, (k, n)| Term::if_(eq(deref(k), *n), acc, Term::diverge()));
    let body = match (ty, &witness.out) {
        (Type::Comm, Event::Star) => Term::seq(applied, done),
        (Type::Nat, Event::Nat(v)) => Term::if_(eq(applied, *v), done, Term::diverge()),
        (Type::Var, Event::Write(v)) => Term::seq(Term::assign(applied, Term::Num(*v)), done),
        (Type::Var, Event::Read(v)) => Term::if_(eq(Term::deref(applied), *v), done, Term::diverge()),
        _ => return Err(AnalysisError::Precondition(format!("cannot observe {} at {ty}", witness.out))),
    };
    Ok(counters.iter().rev().fold(body, |acc, (k, _)| Term::new_var(k, acc)))
}

/// Plugs both terms into `context` and evaluates each from the empty store.
pub fn separate(context: &Term, m: &Term, n: &Term, bounds: &Bounds) -> Result<SeparationOutcome, AnalysisError> {
    let run = |t: &Term| eval(&Store::new(), &plug(context, t), bounds);
    Ok(SeparationOutcome { context: context.clone(), left: run(m)?, right: run(n)? })
}

/// Looks for a separating context without `mkvar` or `random`: both terms
/// are closed over their context and applied to a test for an element
/// that has nothing above it, in the negative order, on the other side.
pub fn test_separation(ctx: &Context, m: &Term, n: &Term, bounds: &Bounds) -> Result<Option<SeparationOutcome>, AnalysisError> {
    let ty = infer(ctx, m)?.ty;
    let close = |t: &Term| ctx.entries().iter().rev().fold(t.clone(), |acc, (x, a)| Term::lambda(x, a.clone(), acc));
    let (cm, cn) = (close(m), close(n));
    let fty = ctx.types().rev().fold(ty, |acc, a| Type::arrow(a.clone(), acc));
    let empty = Context::new();
    let dm = denote(&empty, &cm, &fty, bounds)?;
    let dn = denote(&empty, &cn, &fty, bounds)?;
    let outs = |d: &BTreeSet<TraceTuple>| -> Vec<Event> { d.iter().map(|t| t.out.clone()).collect() };
    let (lm, ln) = (outs(&dm.elems), outs(&dn.elems));
    let lonely = |xs: &[Event], ys: &[Event]| xs.iter().find(|a| !ys.iter().any(|b| leq_minus_event(&fty, a, b))).cloned();
    let Some(a) = lonely(&lm, &ln).or_else(|| lonely(&ln, &lm)) else { return Ok(None) };
    let mut avoid = cm.all_names();
    avoid.extend(cn.all_names());
    let f = fresh_name("f", &avoid);
    let probe: Trace = vec![a];
    let context = Term::app(Term::lambda(&f, fty.clone(), test_term(&fty, &probe, &f)), Term::Hole);
    Ok(Some(separate(&context, &cm, &cn, bounds)?))
}
