//! Coding every type into `nat`: the retraction terms `in_A` and `out_A`,
//! and the definability terms `test` and `produce`.
//!
//! `in_A` has one free identifier `x : A` and type `nat`; `out_A` has one
//! free identifier `y : nat` and type `A`. Composing them is the identity
//! on `A`. An event of type `A` is coded as follows:
//!
//! - `nat`: `n`; `comm`: `0`; `var`: `R(n)` is `2n` and `W(n)` is `2n + 1`
//! - `A -o B`: `(s, b)` is `pair(code_seq(codes of s), code of b)`

pub mod codes;
mod definability;

pub use definability::{
    check_produce_characterization, check_test_characterization, produce_term, test_term, CharacterizationReport,
    ProduceSpec,
};

use std::collections::BTreeSet;

use crate::bounds::Bounds;
use crate::denotational::monrel::{compose_rel, Map};
use crate::denotational::{denote, DenoteError, TraceTuple};
use crate::events::{alphabet, Event};
use crate::syntax::{parse_term, subst, Context, Term, Type};

use codes::{code_pair, code_seq};

fn template(src: &str) -> Term {
    parse_term(src).expect("built-in template parses")
}

/// Code of an event of type `ty`. `None` on overflow or if the event does not fit.
pub fn code_event(ty: &Type, e: &Event) -> Option<u64> {
    match (ty, e) {
        (Type::Nat, Event::Nat(n)) => Some(*n),
        (Type::Comm, Event::Star) => Some(0),
        (Type::Var, Event::Read(n)) => n.checked_mul(2),
        (Type::Var, Event::Write(n)) => n.checked_mul(2)?.checked_add(1),
        (Type::Arrow(a, b), Event::Fun(s, out)) => {
            let items = s.iter().map(|e| code_event(a, e)).collect::<Option<Vec<_>>>()?;
            code_pair(code_seq(&items)?, code_event(b, out)?)
        }
        _ => None,
    }
}

/// Largest code of a bounded event of `ty`.
pub fn max_code(ty: &Type, bounds: &Bounds) -> Option<u64> {
    alphabet(ty, bounds).iter().map(|e| code_event(ty, e)).try_fold(0, |m, c| Some(m.max(c?)))
}

/// The range `random` must cover so that `in_A` can produce every code it needs.
pub fn random_cap_for(ty: &Type, bounds: &Bounds) -> Option<u64> {
    fn need(ty: &Type, b: &Bounds) -> Option<u64> {
        Some(match ty {
            Type::Nat | Type::Comm => 0,
            Type::Var => b.max_nat + 1,
            Type::Arrow(a, c) => need(a, b)?.max(need(c, b)?).max(max_code(a, b)?),
        })
    }
    Some(need(ty, bounds)?.max(bounds.max_nat))
}

/// Stores every value it is asked for, codes the sequence together with
/// the result of `f`.
const IN_NAT_NAT: &str = "
new acc in new len in new res in new out in new k in (
  res := f (new r in (r := random; acc := pair(!r, !acc); len := !len + 1; !r));
  k := !len;
  while !k = 0 do (out := pair(fst !acc, !out); acc := snd !acc; k := !k - 1);
  pair(pair(!len, !out), !res))";

/// Decodes `(s, n)`, checks that the argument yields `s` in order, returns `n`.
const OUT_NAT_NAT: &str = "
lambda z:nat. new yy in new cnt in new rest in (
  yy := y;
  cnt := fst fst !yy;
  rest := snd fst !yy;
  while !cnt = 0 do (ifzero z = fst !rest then diverge else (rest := snd !rest; cnt := !cnt - 1));
  snd !yy)";

const IN_VAR: &str = "new r in (r := random; ifzero !r then 2 * !x else (x := !r - 1; 2 * !r - 1))";

const OUT_VAR: &str = "mkvar(lambda n:nat. ifzero y = 2 * n + 1 then diverge else skip,
  new z in (z := y; ifzero even !z then (diverge; 0) else !z / 2))";

/// `x : A |- in_A : nat`
pub fn in_term(ty: &Type) -> Term {
    match ty {
        Type::Nat => Term::ident("x"),
        Type::Comm => template("x; 0"),
        Type::Var => template(IN_VAR),
        Type::Arrow(a, b) if **a == Type::Nat && **b == Type::Nat => {
            subst(&template(IN_NAT_NAT), "f", &Term::ident("x"))
        }
        Type::Arrow(a, b) => {
            let arg = subst(&out_term(a), "y", &Term::ident("n"));
            let body = subst(&in_term(b), "x", &Term::app(Term::ident("x"), arg));
            subst(&template(IN_NAT_NAT), "f", &Term::lambda("n", Type::Nat, body))
        }
    }
}

/// `y : nat |- out_A : A`
pub fn out_term(ty: &Type) -> Term {
    match ty {
        Type::Nat => Term::ident("y"),
        Type::Comm => template("ifzero y then skip else diverge"),
        Type::Var => template(OUT_VAR),
        Type::Arrow(a, b) if **a == Type::Nat && **b == Type::Nat => template(OUT_NAT_NAT),
        Type::Arrow(a, b) => {
            let coded = Term::app(template(OUT_NAT_NAT), subst(&in_term(a), "x", &Term::ident("a")));
            Term::lambda("a", (**a).clone(), subst(&out_term(b), "y", &coded))
        }
    }
}

/// `x : A |- out_A[in_A / y] : A`
pub fn round_trip_term(ty: &Type) -> Term {
    subst(&out_term(ty), "y", &in_term(ty))
}

/// Result of checking that coding then decoding is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetractionReport {
    pub ty: Type,
    /// Bounded events `e` for which `([e], e)` is absent.
    pub missing: Vec<Event>,
    /// Elements that are not of the form `([e], e)`.
    pub spurious: Vec<TraceTuple>,
    /// Size of the computed composite.
    pub elements: usize,
    /// Range used for `random`.
    pub random_cap: u64,
}

impl RetractionReport {
    pub fn holds(&self) -> bool {
        self.missing.is_empty() && self.spurious.is_empty()
    }
}

fn bounds_for(ty: &Type, bounds: &Bounds) -> Result<Bounds, DenoteError> {
    let cap = random_cap_for(ty, bounds).ok_or(DenoteError::Overflow)?;
    Ok(Bounds { random_cap: Some(cap), max_while_unfold: bounds.max_while_unfold.max(bounds.max_arg_len), ..*bounds })
}

/// Denotes `out_A[in_A/y]` and compares it with the identity on the
/// bounded alphabet of `A`. The composite stands for the relational
/// composition of the two denotations by the substitution law.
pub fn verify_retraction(ty: &Type, bounds: &Bounds) -> Result<RetractionReport, DenoteError> {
    let b = bounds_for(ty, bounds)?;
    let ctx = Context::new().with("x", ty.clone());
    let d = denote(&ctx, &round_trip_term(ty), ty, &b)?;
    let missing = alphabet(ty, bounds)
        .into_iter()
        .filter(|e| !d.contains(&TraceTuple::new(vec![vec![e.clone()]], e.clone())))
        .collect();
    let spurious = d
        .elems
        .iter()
        .filter(|t| t.inputs[0].len() != 1 || t.inputs[0][0] != t.out)
        .cloned()
        .collect();
    Ok(RetractionReport { ty: ty.clone(), missing, spurious, elements: d.len(), random_cap: b.random_max() })
}

/// The same composite built by relational composition of the separately
/// denoted `in_A` and `out_A`, cut to naturals within `bounds.max_nat`.
/// Feasible only when codes stay small.
pub fn retraction_by_composition(ty: &Type, bounds: &Bounds) -> Result<BTreeSet<TraceTuple>, DenoteError> {
    let b = bounds_for(ty, bounds)?;
    let code_bound = max_code(ty, bounds).ok_or(DenoteError::Overflow)?;
    let din = denote(&Context::new().with("x", ty.clone()), &in_term(ty), &Type::Nat, &b)?;
    let wide = Bounds { max_nat: code_bound.max(bounds.max_nat), ..b };
    let dout = denote(&Context::new().with("y", Type::Nat), &out_term(ty), ty, &wide)?;
    let composite = compose_rel(&Map::from_denotation(&din), &Map::from_denotation(&dout));
    let tuples = composite.tuples().ok_or_else(|| DenoteError::Internal("tagged letter".into()))?;
    Ok(tuples.into_iter().filter(|t| t.max_nat() <= bounds.max_nat).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_type;
    use crate::typecheck::check;

    #[test]
    fn retraction_terms_are_well_typed_and_pure() {
        for s in ["nat", "comm", "var", "nat -o nat", "comm -o comm", "var -o comm", "(comm -o comm) -o comm", "var -o var"] {
            let t = parse_type(s).unwrap();
            check(&Context::new().with("x", t.clone()), &in_term(&t), &Type::Nat).unwrap();
            check(&Context::new().with("y", Type::Nat), &out_term(&t), &t).unwrap();
            check(&Context::new().with("x", t.clone()), &round_trip_term(&t), &t).unwrap();
        }
    }

    #[test]
    fn var_codes() {
        let b = Bounds::new(1, 2, 2);
        let d = denote(&Context::new().with("x", Type::Var), &in_term(&Type::Var), &Type::Nat, &Bounds { random_cap: Some(2), ..b })
            .unwrap();
        let want: BTreeSet<_> = (0..2)
            .flat_map(|n| {
                [
                    TraceTuple::new(vec![vec![Event::Read(n)]], Event::Nat(2 * n)),
                    TraceTuple::new(vec![vec![Event::Write(n)]], Event::Nat(2 * n + 1)),
                ]
            })
            .collect();
        assert_eq!(d.restricted_to(3), want);
    }

    #[test]
    fn small_retractions() {
        let b = Bounds::new(1, 2, 2);
        for s in ["comm", "nat", "var"] {
            let t = parse_type(s).unwrap();
            let r = verify_retraction(&t, &b).unwrap();
            assert!(r.holds(), "{s}: {r:?}");
        }
    }

    #[test]
    fn codes_of_function_events() {
        let t = parse_type("comm -o comm").unwrap();
        let e = Event::fun(vec![Event::Star, Event::Star], Event::Star);
        assert_eq!(code_event(&t, &e), Some(6));
        assert!(max_code(&parse_type("(comm -o comm) -o comm").unwrap(), &Bounds::new(1, 2, 2)).is_some());
    }
}
