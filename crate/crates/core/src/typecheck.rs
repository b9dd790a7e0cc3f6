//! Affine type inference.
//!
//! Only application separates resources: the function and its argument
//! must use disjoint identifiers. Every other construct shares its context.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{Context, Term, Type};

/// The inferred type and the identifiers the term actually uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub ty: Type,
    pub used: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type error in `{location}`: {reason}")]
pub struct TypeError {
    pub reason: TypeErrorKind,
    /// The offending subterm, printed.
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeErrorKind {
    #[error("unbound identifier `{0}`")]
    Unbound(String),
    #[error("expected {expected}, found {found}")]
    Mismatch { expected: String, found: Type },
    #[error("function and argument share {0:?}")]
    Sharing(Vec<String>),
    #[error("local variable block must have type comm or nat, found {0}")]
    NewBody(Type),
    #[error("branches have types {0} and {1}")]
    Branches(Type, Type),
    #[error("unfilled hole")]
    Hole,
}

fn err(kind: TypeErrorKind, t: &Term) -> TypeError {
    TypeError { reason: kind, location: t.to_string() }
}

fn expect(ctx: &Context, t: &Term, want: &Type) -> Result<BTreeSet<String>, TypeError> {
    let v = infer(ctx, t)?;
    if &v.ty == want {
        Ok(v.used)
    } else {
        Err(err(TypeErrorKind::Mismatch { expected: want.to_string(), found: v.ty }, t))
    }
}

fn expect_base(ctx: &Context, t: &Term) -> Result<Verdict, TypeError> {
    let v = infer(ctx, t)?;
    if v.ty.is_base() {
        Ok(v)
    } else {
        Err(err(TypeErrorKind::Mismatch { expected: "comm, nat or var".into(), found: v.ty }, t))
    }
}

fn union(mut a: BTreeSet<String>, b: BTreeSet<String>) -> BTreeSet<String> {
    a.extend(b);
    a
}

pub fn infer(ctx: &Context, m: &Term) -> Result<Verdict, TypeError> {
    let v = |ty, used| Ok(Verdict { ty, used });
    match m {
        Term::Num(_) | Term::Random => v(Type::Nat, BTreeSet::new()),
        Term::Skip => v(Type::Comm, BTreeSet::new()),
        Term::Hole => Err(err(TypeErrorKind::Hole, m)),
        Term::Bin(_, a, b) => v(Type::Nat, union(expect(ctx, a, &Type::Nat)?, expect(ctx, b, &Type::Nat)?)),
        Term::Un(_, a) => v(Type::Nat, expect(ctx, a, &Type::Nat)?),
        Term::Seq(a, b) => {
            let ua = expect(ctx, a, &Type::Comm)?;
            let vb = expect_base(ctx, b)?;
            v(vb.ty, union(ua, vb.used))
        }
        Term::Assign(a, b) => v(Type::Comm, union(expect(ctx, a, &Type::Var)?, expect(ctx, b, &Type::Nat)?)),
        Term::Deref(a) => v(Type::Nat, expect(ctx, a, &Type::Var)?),
        Term::While(a, b) => v(Type::Comm, union(expect(ctx, a, &Type::Nat)?, expect(ctx, b, &Type::Comm)?)),
        Term::IfZero(g, a, b) => {
            let ug = expect(ctx, g, &Type::Nat)?;
            let va = expect_base(ctx, a)?;
            let vb = expect_base(ctx, b)?;
            if va.ty != vb.ty {
                return Err(err(TypeErrorKind::Branches(va.ty, vb.ty), m));
            }
            v(va.ty, union(ug, union(va.used, vb.used)))
        }
        Term::Ident(x) => match ctx.lookup(x) {
            Some(t) => v(t.clone(), BTreeSet::from([x.clone()])),
            None => Err(err(TypeErrorKind::Unbound(x.clone()), m)),
        },
        Term::Lambda(x, a, body) => {
            let inner = ctx.clone().with(x, a.clone());
            let mut vb = infer(&inner, body)?;
            vb.used.remove(x);
            v(Type::arrow(a.clone(), vb.ty), vb.used)
        }
        Term::App(f, a) => {
            let vf = infer(ctx, f)?;
            let Type::Arrow(dom, cod) = vf.ty else {
                return Err(err(TypeErrorKind::Mismatch { expected: "a function".into(), found: vf.ty }, f));
            };
            let ua = expect(ctx, a, &dom)?;
            let shared: Vec<String> = vf.used.intersection(&ua).cloned().collect();
            if !shared.is_empty() {
                return Err(err(TypeErrorKind::Sharing(shared), m));
            }
            v(*cod, union(vf.used, ua))
        }
        Term::New(x, body) => {
            let inner = ctx.clone().with(x, Type::Var);
            let mut vb = infer(&inner, body)?;
            if !matches!(vb.ty, Type::Comm | Type::Nat) {
                return Err(err(TypeErrorKind::NewBody(vb.ty), m));
            }
            vb.used.remove(x);
            Ok(vb)
        }
        Term::Mkvar(w, r) => {
            let uw = expect(ctx, w, &Type::arrow(Type::Nat, Type::Comm))?;
            v(Type::Var, union(uw, expect(ctx, r, &Type::Nat)?))
        }
    }
}

/// Checks `ctx |- m : ty`.
pub fn check(ctx: &Context, m: &Term, ty: &Type) -> Result<(), TypeError> {
    expect(ctx, m, ty).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_judgment, parse_term};

    fn ty_of(src: &str) -> Result<Type, TypeError> {
        let (ctx, t) = parse_judgment(src).unwrap();
        infer(&ctx, &t).map(|v| v.ty)
    }

    #[test]
    fn swap_is_a_command() {
        assert_eq!(ty_of("x:var, y:var, z:var |- z := !x; x := !y; y := !z").unwrap(), Type::Comm);
    }

    #[test]
    fn self_application_of_shared_identifier_is_rejected() {
        let e = ty_of("f:comm -o comm, x:comm |- (lambda g:comm. f g) (f x)").unwrap_err();
        assert!(matches!(e.reason, TypeErrorKind::Sharing(_)));
        let e = ty_of("x:var |- (lambda a:comm. lambda b:comm. a; b) (x := 1) (x := 2)").unwrap_err();
        assert!(matches!(e.reason, TypeErrorKind::Sharing(_)));
    }

    #[test]
    fn sequencing_shares_context() {
        assert_eq!(ty_of("x:var |- x := 1; x := !x + 1; !x").unwrap(), Type::Nat);
    }

    #[test]
    fn new_cannot_export_its_variable() {
        let e = ty_of("new x in x").unwrap_err();
        assert!(matches!(e.reason, TypeErrorKind::NewBody(Type::Var)));
    }

    #[test]
    fn mkvar_and_random() {
        assert_eq!(ty_of("mkvar(lambda n:nat. skip, random)").unwrap(), Type::Var);
        assert!(ty_of("mkvar(skip, 3)").is_err());
    }

    #[test]
    fn used_set_excludes_bound_names() {
        let t = parse_term("lambda y:var. new z in z := !x; y := !z").unwrap();
        let ctx = Context::vars(&["x"]);
        let v = infer(&ctx, &t).unwrap();
        assert_eq!(v.used, BTreeSet::from(["x".to_string()]));
        assert_eq!(v.ty, Type::arrow(Type::Var, Type::Comm));
    }

    #[test]
    fn unbound_identifier() {
        assert!(matches!(ty_of("x := 1").unwrap_err().reason, TypeErrorKind::Unbound(_)));
    }
}
