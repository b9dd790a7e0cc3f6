//! Agreement between evaluation and the trace semantics.
//!
//! A ground term is good when, for every store, evaluation reaches exactly
//! the final stores and values that the denotation predicts: some element
//! whose context traces carry the initial store to the final one.

use std::collections::BTreeSet;

use crate::bounds::Bounds;
use crate::denotational::{denote, denote_from_store, TraceTuple};
use crate::events::{strans_all, Event, Store};
use crate::operational::eval;
use crate::syntax::{Context, Term, Type};
use crate::typecheck::infer;

use super::AnalysisError;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoodnessReport {
    /// Stores examined.
    pub stores: usize,
    /// Disagreements; the term is not good if any are present.
    pub mismatches: Vec<String>,
    /// Results the evaluator could not confirm within fuel, or that the
    /// denotation could not confirm within its loop limit.
    pub unconfirmed: Vec<String>,
}

impl GoodnessReport {
    pub fn good(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn merge(&mut self, other: GoodnessReport) {
        self.stores += other.stores;
        self.mismatches.extend(other.mismatches);
        self.unconfirmed.extend(other.unconfirmed);
    }
}

fn all_stores(ctx: &Context, max: u64) -> Vec<Store> {
    let mut out = vec![Store::new()];
    for name in ctx.names() {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..=max).map(move |v| {
                    let mut s = s.clone();
                    s.insert(name.to_string(), v);
                    s
                })
            })
            .collect();
    }
    out
}

fn value_of(e: &Event) -> Option<Term> {
    match e {
        Event::Star => Some(Term::Skip),
        Event::Nat(n) => Some(Term::Num(*n)),
        _ => None,
    }
}

/// Checks goodness over every store with values up to `bounds.max_nat`.
/// Terms of type `var` are checked through `!M` and `M := n`.
pub fn goodness_check(ctx: &Context, m: &Term, bounds: &Bounds) -> Result<GoodnessReport, AnalysisError> {
    if !ctx.all_var() {
        return Err(AnalysisError::Precondition("goodness needs a context of variables".into()));
    }
    match infer(ctx, m)?.ty {
        Type::Var => {
            let mut r = ground(ctx, &Term::deref(m.clone()), &Type::Nat, bounds)?;
            for n in 0..=bounds.max_nat {
                r.merge(ground(ctx, &Term::assign(m.clone(), Term::Num(n)), &Type::Comm, bounds)?);
            }
            Ok(r)
        }
        ty @ (Type::Comm | Type::Nat) => ground(ctx, m, &ty, bounds),
        ty => Err(AnalysisError::Precondition(format!("goodness is defined for ground types, not {ty}"))),
    }
}

fn ground(ctx: &Context, m: &Term, ty: &Type, bounds: &Bounds) -> Result<GoodnessReport, AnalysisError> {
    let names: Vec<&str> = ctx.names().collect();
    let full = denote(ctx, m, ty, bounds)?;
    let mut r = GoodnessReport::default();
    for sigma in all_stores(ctx, bounds.max_nat) {
        r.stores += 1;
        let ops = eval(&sigma, m, bounds)?;
        let guided = denote_from_store(ctx, m, ty, &sigma, bounds)?;
        let mut predicted: BTreeSet<(Store, Term)> = BTreeSet::new();
        for (t, after) in &guided.results {
            if strans_all(&sigma, &names, &t.inputs).as_ref() != Some(after) {
                r.mismatches.push(format!("{m} from {sigma:?}: traces {t} do not lead to {after:?}"));
            }
            let Some(v) = value_of(&t.out) else { continue };
            predicted.insert((after.clone(), v.clone()));
            if !ops.results.contains(&(after.clone(), v)) {
                let msg = format!("{m} from {sigma:?}: denotation predicts {t} ending in {after:?}");
                if ops.exhausted {
                    r.unconfirmed.push(msg);
                } else {
                    r.mismatches.push(msg + ", evaluation disagrees");
                }
            }
        }
        for (after, v) in &ops.results {
            if !predicted.contains(&(after.clone(), v.clone())) {
                let msg = format!("{m} from {sigma:?}: evaluation gives {v} in {after:?}");
                if guided.truncated {
                    r.unconfirmed.push(msg);
                } else {
                    r.mismatches.push(msg + ", no element of the denotation explains it");
                }
            }
        }
        // The unguided denotation must agree with the guided one where both apply.
        let fits = |t: &TraceTuple| {
            t.inputs.iter().all(|s| s.len() <= bounds.max_trace_len)
                && t.inputs.iter().flatten().all(|e| !matches!(e, Event::Read(n) if *n > bounds.max_nat))
        };
        for t in &full.elems {
            if let Some(after) = strans_all(&sigma, &names, &t.inputs) {
                if !guided.results.contains(&(t.clone(), after)) {
                    r.mismatches.push(format!("{m} from {sigma:?}: {t} is realisable but the guided run misses it"));
                }
            }
        }
        for (t, _) in &guided.results {
            if fits(t) && !full.contains(t) {
                r.mismatches.push(format!("{m} from {sigma:?}: guided element {t} is absent from the denotation"));
            }
        }
    }
    Ok(r)
}
