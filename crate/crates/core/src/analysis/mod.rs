//! Checks built on top of the semantics: bounded equivalence, agreement
//! with the evaluator, coherence, and separating contexts.

mod coherence;
mod goodness;
mod separation;

pub use coherence::{coherence_check, incoherent_pair};
pub use goodness::{goodness_check, GoodnessReport};
pub use separation::{mkvar_separation_context, separate, test_separation, SeparationOutcome};

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::bounds::Bounds;
use crate::denotational::{denote, DenoteError, TraceTuple};
use crate::operational::EvalError;
use crate::syntax::{Context, Term, Type};
use crate::typecheck::{infer, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Denote(#[from] DenoteError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivStatus {
    EqualAtBounds,
    /// `witness` belongs only to the denotation on `side`.
    Differs { witness: TraceTuple, side: Side },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivVerdict {
    pub status: EquivStatus,
    pub bounds: Bounds,
}

impl EquivVerdict {
    pub fn is_equal(&self) -> bool {
        self.status == EquivStatus::EqualAtBounds
    }

    pub fn to_json(&self) -> serde_json::Value {
        match &self.status {
            EquivStatus::EqualAtBounds => json!({ "status": "EqualAtBounds", "bounds": self.bounds }),
            EquivStatus::Differs { witness, side } => {
                json!({ "status": "Differs", "witness": witness, "side": side, "bounds": self.bounds })
            }
        }
    }
}

/// Compares two terms of the same type by their bounded denotations. The
/// witness is the least element of the symmetric difference.
pub fn equiv(ctx: &Context, m: &Term, n: &Term, bounds: &Bounds) -> Result<EquivVerdict, AnalysisError> {
    let (tm, tn) = (infer(ctx, m)?.ty, infer(ctx, n)?.ty);
    if tm != tn {
        return Err(AnalysisError::Precondition(format!("terms have types {tm} and {tn}")));
    }
    let dm = denote(ctx, m, &tm, bounds)?;
    let dn = denote(ctx, n, &tn, bounds)?;
    let left = dm.elems.difference(&dn.elems).next();
    let right = dn.elems.difference(&dm.elems).next();
    let status = match (left, right) {
        (None, None) => EquivStatus::EqualAtBounds,
        (Some(l), Some(r)) if r < l => EquivStatus::Differs { witness: r.clone(), side: Side::Right },
        (Some(l), _) => EquivStatus::Differs { witness: l.clone(), side: Side::Left },
        (None, Some(r)) => EquivStatus::Differs { witness: r.clone(), side: Side::Right },
    };
    Ok(EquivVerdict { status, bounds: *bounds })
}

/// Type of a term in a context, or the error.
pub fn type_of(ctx: &Context, m: &Term) -> Result<Type, AnalysisError> {
    Ok(infer(ctx, m)?.ty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    #[test]
    fn write_versus_read_test() {
        let ctx = Context::vars(&["x"]);
        let m = parse_term("x := 3").unwrap();
        let n = parse_term("ifzero !x - 3 + (3 - !x) then skip else diverge").unwrap();
        let v = equiv(&ctx, &m, &n, &Bounds::new(3, 3, 2)).unwrap();
        let EquivStatus::Differs { witness, side } = v.status else { panic!() };
        assert_eq!(side, Side::Left);
        assert_eq!(witness.to_string(), "([W(3)], *)");
        let back = equiv(&ctx, &n, &m, &Bounds::new(3, 3, 2)).unwrap();
        assert_eq!(back.status, EquivStatus::Differs { witness, side: Side::Right });
    }

    #[test]
    fn local_swap_equals_direct_exchange() {
        let ctx = Context::vars(&["x", "y"]);
        let m = parse_term("new z in z := !x; x := !y; y := !z").unwrap();
        let n = parse_term("new a in new b in a := !x; b := !y; x := !b; y := !a").unwrap();
        assert!(equiv(&ctx, &m, &n, &Bounds::new(1, 2, 2)).unwrap().is_equal());
    }

    #[test]
    fn type_mismatch_is_an_error() {
        let ctx = Context::new();
        assert!(equiv(&ctx, &Term::Skip, &Term::Num(0), &Bounds::default()).is_err());
    }
}
