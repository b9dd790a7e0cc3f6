//! Abstract syntax: types, terms, contexts, substitution and alpha-equivalence.

mod parse;
mod pretty;

pub use parse::{parse_judgment, parse_term, parse_type, ParseError};

use std::collections::BTreeSet;
use std::fmt;

use crate::universal::codes;

/// Types of the language. `Arrow` is the affine function space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Nat,
    Comm,
    Var,
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    /// `nat`, `comm` or `var`.
    pub fn is_base(&self) -> bool {
        !matches!(self, Type::Arrow(..))
    }

    /// Arrow nesting depth on the left; base types have order 0.
    pub fn order(&self) -> usize {
        match self {
            Type::Arrow(a, b) => (a.order() + 1).max(b.order()),
            _ => 0,
        }
    }

    /// Splits `A1 -o ... -o An -o B` into its argument types and base result.
    pub fn uncurry(&self) -> (Vec<Type>, Type) {
        let mut args = Vec::new();
        let mut t = self;
        while let Type::Arrow(a, b) = t {
            args.push((**a).clone());
            t = b;
        }
        (args, t.clone())
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Nat => f.write_str("nat"),
            Type::Comm => f.write_str("comm"),
            Type::Var => f.write_str("var"),
            Type::Arrow(a, b) if a.is_base() => write!(f, "{a} -o {b}"),
            Type::Arrow(a, b) => write!(f, "({a}) -o {b}"),
        }
    }
}

/// Binary arithmetic operators. All act on naturals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    /// Truncated subtraction.
    Monus,
    Mul,
    /// Integer division; zero when the divisor is zero.
    Div,
    /// Remainder; `n % 0 = n`.
    Mod,
    /// 1 if equal, else 0.
    Eq,
    /// 1 if strictly less, else 0.
    Lt,
    /// Cantor pairing.
    Pair,
}

impl BinOp {
    /// `None` on overflow.
    pub fn apply(self, a: u64, b: u64) -> Option<u64> {
        Some(match self {
            BinOp::Add => a.checked_add(b)?,
            BinOp::Monus => a.saturating_sub(b),
            BinOp::Mul => a.checked_mul(b)?,
            BinOp::Div => a.checked_div(b).unwrap_or(0),
            BinOp::Mod => a.checked_rem(b).unwrap_or(a),
            BinOp::Eq => (a == b) as u64,
            BinOp::Lt => (a < b) as u64,
            BinOp::Pair => codes::code_pair(a, b)?,
        })
    }

    pub(crate) fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Monus => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "=",
            BinOp::Lt => "<",
            BinOp::Pair => "pair",
        }
    }
}

/// Unary operators on naturals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnOp {
    /// First projection of a Cantor pair.
    Fst,
    /// Second projection of a Cantor pair.
    Snd,
    /// 1 if even, else 0.
    Even,
}

impl UnOp {
    pub fn apply(self, a: u64) -> u64 {
        match self {
            UnOp::Fst => codes::decode_pair(a).0,
            UnOp::Snd => codes::decode_pair(a).1,
            UnOp::Even => a.is_multiple_of(2) as u64,
        }
    }

    pub(crate) fn keyword(self) -> &'static str {
        match self {
            UnOp::Fst => "fst",
            UnOp::Snd => "snd",
            UnOp::Even => "even",
        }
    }
}

/// Terms. `Hole` only occurs in contexts built for [`plug`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Num(u64),
    Bin(BinOp, Box<Term>, Box<Term>),
    Un(UnOp, Box<Term>),
    Skip,
    Seq(Box<Term>, Box<Term>),
    /// `target := value`
    Assign(Box<Term>, Box<Term>),
    Deref(Box<Term>),
    /// Loops while the guard is zero.
    While(Box<Term>, Box<Term>),
    IfZero(Box<Term>, Box<Term>, Box<Term>),
    Ident(String),
    Lambda(String, Type, Box<Term>),
    App(Box<Term>, Box<Term>),
    New(String, Box<Term>),
    /// `mkvar(writer, reader)`
    Mkvar(Box<Term>, Box<Term>),
    Random,
    Hole,
}

impl Term {
    pub fn ident(x: &str) -> Term {
        Term::Ident(x.to_string())
    }
    pub fn bin(op: BinOp, a: Term, b: Term) -> Term {
        Term::Bin(op, Box::new(a), Box::new(b))
    }
    pub fn un(op: UnOp, a: Term) -> Term {
        Term::Un(op, Box::new(a))
    }
    pub fn seq(a: Term, b: Term) -> Term {
        Term::Seq(Box::new(a), Box::new(b))
    }
    /// Right-nested sequence; `skip` when empty.
    pub fn seq_all(items: impl IntoIterator<Item = Term>) -> Term {
        let mut items: Vec<Term> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Term::Skip;
        };
        while let Some(t) = items.pop() {
            acc = Term::seq(t, acc);
        }
        acc
    }
    pub fn assign(target: Term, value: Term) -> Term {
        Term::Assign(Box::new(target), Box::new(value))
    }
    pub fn deref(a: Term) -> Term {
        Term::Deref(Box::new(a))
    }
    pub fn while_(g: Term, body: Term) -> Term {
        Term::While(Box::new(g), Box::new(body))
    }
    pub fn ifzero(g: Term, t: Term, e: Term) -> Term {
        Term::IfZero(Box::new(g), Box::new(t), Box::new(e))
    }
    /// `if g then t else e`, taking the `then` branch when `g` is nonzero.
    pub fn if_(g: Term, t: Term, e: Term) -> Term {
        Term::ifzero(g, e, t)
    }
    pub fn lambda(x: &str, ty: Type, body: Term) -> Term {
        Term::Lambda(x.to_string(), ty, Box::new(body))
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }
    pub fn new_var(x: &str, body: Term) -> Term {
        Term::New(x.to_string(), Box::new(body))
    }
    pub fn mkvar(w: Term, r: Term) -> Term {
        Term::Mkvar(Box::new(w), Box::new(r))
    }
    /// The divergent command `while 0 do skip`.
    pub fn diverge() -> Term {
        Term::while_(Term::Num(0), Term::Skip)
    }
    pub fn is_diverge(&self) -> bool {
        matches!(self, Term::While(g, b) if **g == Term::Num(0) && **b == Term::Skip)
    }

    /// Syntactic values of the operational semantics.
    pub fn is_value(&self) -> bool {
        matches!(
            self,
            Term::Num(_) | Term::Skip | Term::Ident(_) | Term::Lambda(..) | Term::Mkvar(..)
        )
    }

    fn children(&self) -> Vec<&Term> {
        match self {
            Term::Num(_) | Term::Skip | Term::Ident(_) | Term::Random | Term::Hole => vec![],
            Term::Un(_, a) | Term::Deref(a) | Term::Lambda(_, _, a) | Term::New(_, a) => vec![a],
            Term::Bin(_, a, b)
            | Term::Seq(a, b)
            | Term::Assign(a, b)
            | Term::While(a, b)
            | Term::App(a, b)
            | Term::Mkvar(a, b) => vec![a, b],
            Term::IfZero(a, b, c) => vec![a, b, c],
        }
    }

    /// True if any subterm satisfies `p`.
    pub fn any(&self, p: &impl Fn(&Term) -> bool) -> bool {
        p(self) || self.children().into_iter().any(|c| c.any(p))
    }

    pub fn uses_mkvar(&self) -> bool {
        self.any(&|t| matches!(t, Term::Mkvar(..)))
    }
    pub fn uses_random(&self) -> bool {
        self.any(&|t| matches!(t, Term::Random))
    }
    pub fn contains_diverge(&self) -> bool {
        self.any(&|t| t.is_diverge())
    }
    /// No lambda, application, mkvar or random.
    pub fn is_basic(&self) -> bool {
        !self.any(&|t| {
            matches!(t, Term::Lambda(..) | Term::App(..) | Term::Mkvar(..) | Term::Random)
        })
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Term::size).sum::<usize>()
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        free_into(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every identifier occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        names_into(self, &mut out);
        out
    }
}

fn free_into<'a>(t: &'a Term, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
    match t {
        Term::Ident(x) => {
            if !bound.contains(&x.as_str()) {
                out.insert(x.clone());
            }
        }
        Term::Lambda(x, _, b) | Term::New(x, b) => {
            bound.push(x);
            free_into(b, bound, out);
            bound.pop();
        }
        _ => {
            for c in t.children() {
                free_into(c, bound, out);
            }
        }
    }
}

fn names_into(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Ident(x) => {
            out.insert(x.clone());
        }
        Term::Lambda(x, _, _) | Term::New(x, _) => {
            out.insert(x.clone());
        }
        _ => {}
    }
    for c in t.children() {
        names_into(c, out);
    }
}

/// A name based on `base` that is not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
    let stem = if stem.is_empty() { "v" } else { stem };
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply")
}

/// Capture-avoiding substitution `m[n/x]`.
pub fn subst(m: &Term, x: &str, n: &Term) -> Term {
    let fv = n.free_vars();
    subst_rec(m, x, n, &fv)
}

fn subst_rec(m: &Term, x: &str, n: &Term, fv: &BTreeSet<String>) -> Term {
    let go = |t: &Term| Box::new(subst_rec(t, x, n, fv));
    match m {
        Term::Ident(y) if y == x => n.clone(),
        Term::Num(_) | Term::Skip | Term::Ident(_) | Term::Random | Term::Hole => m.clone(),
        Term::Lambda(y, _, body) | Term::New(y, body) => {
            let rebuild = |y: String, body: Term| match m {
                Term::Lambda(_, ty, _) => Term::Lambda(y, ty.clone(), Box::new(body)),
                _ => Term::New(y, Box::new(body)),
            };
            if y == x || !body.free_vars().contains(x) {
                return m.clone();
            }
            if fv.contains(y) {
                let mut avoid = fv.clone();
                avoid.extend(body.all_names());
                avoid.insert(x.to_string());
                let y2 = fresh_name(y, &avoid);
                let renamed = subst_rec(body, y, &Term::Ident(y2.clone()), &BTreeSet::from([y2.clone()]));
                rebuild(y2, subst_rec(&renamed, x, n, fv))
            } else {
                rebuild(y.clone(), subst_rec(body, x, n, fv))
            }
        }
        Term::Bin(op, a, b) => Term::Bin(*op, go(a), go(b)),
        Term::Un(op, a) => Term::Un(*op, go(a)),
        Term::Seq(a, b) => Term::Seq(go(a), go(b)),
        Term::Assign(a, b) => Term::Assign(go(a), go(b)),
        Term::Deref(a) => Term::Deref(go(a)),
        Term::While(a, b) => Term::While(go(a), go(b)),
        Term::IfZero(a, b, c) => Term::IfZero(go(a), go(b), go(c)),
        Term::App(a, b) => Term::App(go(a), go(b)),
        Term::Mkvar(a, b) => Term::Mkvar(go(a), go(b)),
    }
}

/// Renames free identifiers simultaneously according to `pairs`.
pub fn rename_free(m: &Term, pairs: &[(String, String)]) -> Term {
    // Two passes through temporaries keep the renaming simultaneous.
    let mut avoid = m.all_names();
    for (a, b) in pairs {
        avoid.insert(a.clone());
        avoid.insert(b.clone());
    }
    let mut temps = Vec::new();
    let mut t = m.clone();
    for (from, _) in pairs {
        let tmp = fresh_name("tmp", &avoid);
        avoid.insert(tmp.clone());
        t = subst(&t, from, &Term::Ident(tmp.clone()));
        temps.push(tmp);
    }
    for (tmp, (_, to)) in temps.iter().zip(pairs) {
        t = subst(&t, tmp, &Term::Ident(to.clone()));
    }
    t
}

/// Replaces the hole of `context` by `m`, capturing free identifiers.
pub fn plug(context: &Term, m: &Term) -> Term {
    match context {
        Term::Hole => m.clone(),
        Term::Num(_) | Term::Skip | Term::Ident(_) | Term::Random => context.clone(),
        Term::Bin(op, a, b) => Term::bin(*op, plug(a, m), plug(b, m)),
        Term::Un(op, a) => Term::un(*op, plug(a, m)),
        Term::Seq(a, b) => Term::seq(plug(a, m), plug(b, m)),
        Term::Assign(a, b) => Term::assign(plug(a, m), plug(b, m)),
        Term::Deref(a) => Term::deref(plug(a, m)),
        Term::While(a, b) => Term::while_(plug(a, m), plug(b, m)),
        Term::IfZero(a, b, c) => Term::ifzero(plug(a, m), plug(b, m), plug(c, m)),
        Term::Lambda(x, ty, b) => Term::lambda(x, ty.clone(), plug(b, m)),
        Term::App(a, b) => Term::app(plug(a, m), plug(b, m)),
        Term::New(x, b) => Term::new_var(x, plug(b, m)),
        Term::Mkvar(a, b) => Term::mkvar(plug(a, m), plug(b, m)),
    }
}

/// Equality up to renaming of bound identifiers.
pub fn alpha_eq(m: &Term, n: &Term) -> bool {
    alpha_rec(m, n, &mut Vec::new())
}

fn alpha_rec<'a>(m: &'a Term, n: &'a Term, env: &mut Vec<(&'a str, &'a str)>) -> bool {
    use Term::*;
    match (m, n) {
        (Ident(x), Ident(y)) => {
            let l = env.iter().rev().position(|(a, _)| *a == x);
            let r = env.iter().rev().position(|(_, b)| *b == y);
            match (l, r) {
                (None, None) => x == y,
                (a, b) => a == b,
            }
        }
        (Lambda(x, tx, a), Lambda(y, ty, b)) => {
            tx == ty && {
                env.push((x, y));
                let ok = alpha_rec(a, b, env);
                env.pop();
                ok
            }
        }
        (New(x, a), New(y, b)) => {
            env.push((x, y));
            let ok = alpha_rec(a, b, env);
            env.pop();
            ok
        }
        (Num(a), Num(b)) => a == b,
        (Skip, Skip) | (Random, Random) | (Hole, Hole) => true,
        (Bin(o1, a1, b1), Bin(o2, a2, b2)) => o1 == o2 && alpha_rec(a1, a2, env) && alpha_rec(b1, b2, env),
        (Un(o1, a1), Un(o2, a2)) => o1 == o2 && alpha_rec(a1, a2, env),
        (Deref(a1), Deref(a2)) => alpha_rec(a1, a2, env),
        (Seq(a1, b1), Seq(a2, b2))
        | (Assign(a1, b1), Assign(a2, b2))
        | (While(a1, b1), While(a2, b2))
        | (App(a1, b1), App(a2, b2))
        | (Mkvar(a1, b1), Mkvar(a2, b2)) => alpha_rec(a1, a2, env) && alpha_rec(b1, b2, env),
        (IfZero(a1, b1, c1), IfZero(a2, b2, c2)) => {
            alpha_rec(a1, a2, env) && alpha_rec(b1, b2, env) && alpha_rec(c1, c2, env)
        }
        _ => false,
    }
}

/// An ordered typing context of distinct identifiers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Context {
    entries: Vec<(String, Type)>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    /// Builds a context; `None` if an identifier repeats.
    pub fn from_entries(entries: Vec<(String, Type)>) -> Option<Context> {
        let names: BTreeSet<&str> = entries.iter().map(|(n, _)| n.as_str()).collect();
        (names.len() == entries.len()).then_some(Context { entries })
    }

    /// Every name bound at type `var`.
    pub fn vars(names: &[&str]) -> Context {
        Context::from_entries(names.iter().map(|n| (n.to_string(), Type::Var)).collect())
            .expect("distinct names")
    }

    pub fn with(mut self, name: &str, ty: Type) -> Context {
        self.entries.retain(|(n, _)| n != name);
        self.entries.push((name.to_string(), ty));
        self
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.entries.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|(n, _)| n == name)
    }

    pub fn entries(&self) -> &[(String, Type)] {
        &self.entries
    }

    pub fn names(&self) -> impl DoubleEndedIterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn types(&self) -> impl DoubleEndedIterator<Item = &Type> {
        self.entries.iter().map(|(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn all_var(&self) -> bool {
        self.types().all(|t| *t == Type::Var)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}:{t}")?;
        }
        Ok(())
    }
}
