//! Printing in the concrete syntax accepted by the parser.

use std::fmt;

use super::{BinOp, Term};

// Precedence levels, loosest first.
const SEQ: u8 = 0;
const STMT: u8 = 1;
const ASSIGN: u8 = 2;
const CMP: u8 = 3;
const ADD: u8 = 4;
const MUL: u8 = 5;
const APP: u8 = 6;
const ATOM: u8 = 7;

fn level(t: &Term) -> u8 {
    match t {
        Term::Seq(..) => SEQ,
        Term::Lambda(..) | Term::New(..) | Term::While(..) | Term::IfZero(..) => STMT,
        Term::Assign(..) => ASSIGN,
        Term::Bin(BinOp::Eq | BinOp::Lt, ..) => CMP,
        Term::Bin(BinOp::Add | BinOp::Monus, ..) => ADD,
        Term::Bin(BinOp::Mul | BinOp::Div | BinOp::Mod, ..) => MUL,
        Term::App(..) => APP,
        _ => ATOM,
    }
}

struct P<'a>(&'a Term, u8, bool);

impl fmt::Display for P<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let P(t, min, rightmost) = *self;
        let lvl = level(t);
        // Binders and loops extend to the right, so they need parentheses
        // anywhere something could follow them.
        if lvl < min || (lvl == STMT && !rightmost) {
            return write!(f, "({})", P(t, SEQ, true));
        }
        match t {
            Term::Num(n) => write!(f, "{n}"),
            Term::Ident(x) => f.write_str(x),
            Term::Skip => f.write_str("skip"),
            Term::Random => f.write_str("random"),
            Term::Hole => f.write_str("[-]"),
            Term::While(..) if t.is_diverge() => f.write_str("diverge"),
            Term::Bin(BinOp::Pair, a, b) => write!(f, "pair({}, {})", P(a, SEQ, true), P(b, SEQ, true)),
            Term::Bin(op @ (BinOp::Eq | BinOp::Lt), a, b) => {
                write!(f, "{} {} {}", P(a, ADD, false), op.symbol(), P(b, ADD, rightmost))
            }
            Term::Bin(op, a, b) => {
                write!(f, "{} {} {}", P(a, lvl, false), op.symbol(), P(b, lvl + 1, rightmost))
            }
            Term::Un(op, a) => write!(f, "{} {}", op.keyword(), P(a, ATOM, rightmost)),
            Term::Deref(a) => write!(f, "!{}", P(a, ATOM, rightmost)),
            Term::Seq(a, b) => write!(f, "{}; {}", P(a, STMT, false), P(b, SEQ, rightmost)),
            Term::Assign(a, b) => write!(f, "{} := {}", P(a, CMP, false), P(b, CMP, rightmost)),
            Term::While(g, b) => write!(f, "while {} do {}", P(g, SEQ, true), P(b, STMT, rightmost)),
            Term::IfZero(g, a, b) => write!(
                f,
                "ifzero {} then {} else {}",
                P(g, SEQ, true),
                P(a, SEQ, true),
                P(b, STMT, rightmost)
            ),
            Term::Lambda(x, ty, b) => write!(f, "lambda {x}:{ty}. {}", P(b, SEQ, rightmost)),
            Term::New(x, b) => write!(f, "new {x} in {}", P(b, SEQ, rightmost)),
            Term::App(a, b) => write!(f, "{} {}", P(a, APP, false), P(b, ATOM, rightmost)),
            Term::Mkvar(a, b) => write!(f, "mkvar({}, {})", P(a, SEQ, true), P(b, SEQ, true)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        P(self, SEQ, true).fmt(f)
    }
}
