//! Big-step call-by-name evaluation with substitution, nondeterministic
//! `random` and a per-derivation fuel budget.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bounds::Bounds;
use crate::events::Store;
use crate::syntax::{fresh_name, subst, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation stuck: {0}")]
    Stuck(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("arithmetic overflow")]
    Overflow,
}

/// Every terminating result within fuel, and whether some derivation ran out.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EvalOutcome {
    pub results: BTreeSet<(Store, Term)>,
    pub exhausted: bool,
}

impl EvalOutcome {
    pub fn converges(&self) -> bool {
        !self.results.is_empty()
    }
}

type Branches = Vec<(Store, Term, u64)>;

struct Evaluator {
    max_random: u64,
    exhausted: bool,
}

/// Evaluates `m` from `sigma`. Free identifiers of `m` must all be store
/// variables.
pub fn eval(sigma: &Store, m: &Term, bounds: &Bounds) -> Result<EvalOutcome, EvalError> {
    if let Some(x) = m.free_vars().into_iter().find(|x| !sigma.contains_key(x)) {
        return Err(EvalError::Precondition(format!("free identifier `{x}` is not a store variable")));
    }
    let mut ev = Evaluator { max_random: bounds.random_max(), exhausted: false };
    let branches = ev.eval(sigma.clone(), m, bounds.fuel)?;
    Ok(EvalOutcome { results: branches.into_iter().map(|(s, v, _)| (s, v)).collect(), exhausted: ev.exhausted })
}

impl Evaluator {
    fn nat(&mut self, s: Store, m: &Term, fuel: u64) -> Result<Vec<(Store, u64, u64)>, EvalError> {
        self.eval(s, m, fuel)?
            .into_iter()
            .map(|(s, v, f)| match v {
                Term::Num(n) => Ok((s, n, f)),
                other => Err(EvalError::Stuck(format!("expected a numeral, got `{other}`"))),
            })
            .collect()
    }

    fn comm(&mut self, s: Store, m: &Term, fuel: u64) -> Result<Vec<(Store, u64)>, EvalError> {
        self.eval(s, m, fuel)?
            .into_iter()
            .map(|(s, v, f)| match v {
                Term::Skip => Ok((s, f)),
                other => Err(EvalError::Stuck(format!("expected skip, got `{other}`"))),
            })
            .collect()
    }

    fn eval(&mut self, s: Store, m: &Term, fuel: u64) -> Result<Branches, EvalError> {
        if fuel == 0 {
            self.exhausted = true;
            return Ok(vec![]);
        }
        let fuel = fuel - 1;
        let mut out = Vec::new();
        match m {
            Term::Num(_) | Term::Skip | Term::Lambda(..) | Term::Mkvar(..) => out.push((s, m.clone(), fuel)),
            Term::Ident(x) => {
                if !s.contains_key(x) {
                    return Err(EvalError::Precondition(format!("`{x}` is not a store variable")));
                }
                out.push((s, m.clone(), fuel));
            }
            Term::Hole => return Err(EvalError::Stuck("unfilled hole".into())),
            Term::Random => {
                for n in 0..=self.max_random {
                    out.push((s.clone(), Term::Num(n), fuel));
                }
            }
            Term::Bin(op, a, b) => {
                for (s1, n1, f1) in self.nat(s, a, fuel)? {
                    for (s2, n2, f2) in self.nat(s1, b, f1)? {
                        out.push((s2, Term::Num(op.apply(n1, n2).ok_or(EvalError::Overflow)?), f2));
                    }
                }
            }
            Term::Un(op, a) => {
                for (s1, n, f1) in self.nat(s, a, fuel)? {
                    out.push((s1, Term::Num(op.apply(n)), f1));
                }
            }
            Term::Seq(a, b) => {
                for (s1, f1) in self.comm(s, a, fuel)? {
                    out.extend(self.eval(s1, b, f1)?);
                }
            }
            Term::Assign(target, value) => {
                for (s1, n, f1) in self.nat(s, value, fuel)? {
                    for (mut s2, v, f2) in self.eval(s1, target, f1)? {
                        match v {
                            Term::Ident(x) => {
                                s2.insert(x, n);
                                out.push((s2, Term::Skip, f2));
                            }
                            Term::Mkvar(w, _) => {
                                let call = Term::app(*w, Term::Num(n));
                                for (s3, f3) in self.comm(s2, &call, f2)? {
                                    out.push((s3, Term::Skip, f3));
                                }
                            }
                            other => return Err(EvalError::Stuck(format!("cannot assign to `{other}`"))),
                        }
                    }
                }
            }
            Term::Deref(a) => {
                for (s1, v, f1) in self.eval(s, a, fuel)? {
                    match v {
                        Term::Ident(x) => {
                            let n = s1[&x];
                            out.push((s1, Term::Num(n), f1));
                        }
                        Term::Mkvar(_, r) => {
                            for (s2, n, f2) in self.nat(s1, &r, f1)? {
                                out.push((s2, Term::Num(n), f2));
                            }
                        }
                        other => return Err(EvalError::Stuck(format!("cannot dereference `{other}`"))),
                    }
                }
            }
            Term::While(g, body) => {
                // Each further iteration is one more application of the loop rule.
                let mut frontier: BTreeSet<(Store, u64)> = BTreeSet::from([(s, fuel)]);
                while !frontier.is_empty() {
                    let mut next = BTreeSet::new();
                    for (s0, f0) in frontier {
                        for (s1, n, f1) in self.nat(s0, g, f0)? {
                            if n != 0 {
                                out.push((s1, Term::Skip, f1));
                                continue;
                            }
                            for (s2, f2) in self.comm(s1, body, f1)? {
                                if f2 == 0 {
                                    self.exhausted = true;
                                } else {
                                    next.insert((s2, f2 - 1));
                                }
                            }
                        }
                    }
                    frontier = next;
                }
            }
            Term::IfZero(g, a, b) => {
                for (s1, n, f1) in self.nat(s, g, fuel)? {
                    out.extend(self.eval(s1, if n == 0 { a } else { b }, f1)?);
                }
            }
            Term::App(f, a) => {
                for (s1, v, f1) in self.eval(s, f, fuel)? {
                    match v {
                        Term::Lambda(x, _, body) => out.extend(self.eval(s1, &subst(&body, &x, a), f1)?),
                        other => return Err(EvalError::Stuck(format!("cannot apply `{other}`"))),
                    }
                }
            }
            Term::New(x, body) => {
                let mut avoid: BTreeSet<String> = body.all_names();
                avoid.remove(x);
                avoid.extend(s.keys().cloned());
                let cell = fresh_name(x, &avoid);
                let body = if &cell == x { (**body).clone() } else { subst(body, x, &Term::Ident(cell.clone())) };
                let mut s0 = s;
                s0.insert(cell.clone(), 0);
                for (mut s1, v, f1) in self.eval(s0, &body, fuel)? {
                    s1.remove(&cell);
                    out.push((s1, v, f1));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn store(pairs: &[(&str, u64)]) -> Store {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn run(s: &Store, src: &str) -> EvalOutcome {
        eval(s, &parse_term(src).unwrap(), &Bounds::default()).unwrap()
    }

    #[test]
    fn swap_exchanges_values() {
        let o = run(&store(&[("x", 1), ("y", 2), ("z", 0)]), "z := !x; x := !y; y := !z");
        assert_eq!(o.results, BTreeSet::from([(store(&[("x", 2), ("y", 1), ("z", 1)]), Term::Skip)]));
    }

    #[test]
    fn local_variable_is_discarded() {
        let o = run(&store(&[]), "new x in (x := 7; !x)");
        assert_eq!(o.results, BTreeSet::from([(store(&[]), Term::Num(7))]));
    }

    #[test]
    fn local_variable_shadowing_store() {
        let o = run(&store(&[("x", 5)]), "new x in x := 1; !x");
        assert_eq!(o.results, BTreeSet::from([(store(&[("x", 5)]), Term::Num(1))]));
    }

    #[test]
    fn divergence_exhausts_fuel() {
        let o = run(&store(&[]), "diverge");
        assert!(o.results.is_empty() && o.exhausted);
    }

    #[test]
    fn random_enumerates_range() {
        let o = run(&store(&[]), "random");
        assert_eq!(o.results.len(), 3);
        assert!(!o.exhausted);
    }

    #[test]
    fn mkvar_assignment_and_read() {
        let o = run(&store(&[("x", 0)]), "mkvar(lambda n:nat. x := n + 1, 9) := 3; !mkvar(lambda n:nat. skip, !x)");
        assert_eq!(o.results, BTreeSet::from([(store(&[("x", 4)]), Term::Num(4))]));
    }

    #[test]
    fn loop_runs_until_guard_nonzero() {
        let o = run(&store(&[("x", 0)]), "while 2 < !x + 1 do x := !x + 1");
        assert_eq!(o.results, BTreeSet::from([(store(&[("x", 2)]), Term::Skip)]));
    }

    #[test]
    fn open_term_rejected() {
        let e = eval(&store(&[]), &parse_term("!x").unwrap(), &Bounds::default()).unwrap_err();
        assert!(matches!(e, EvalError::Precondition(_)));
    }

    #[test]
    fn value_of_function_type() {
        let o = run(&store(&[("x", 0)]), "(lambda f:comm -o comm. f) (lambda c:comm. c; x := 1)");
        assert_eq!(o.results.len(), 1);
        assert!(matches!(o.results.iter().next().unwrap().1, Term::Lambda(..)));
    }
}
