//! Recursive-descent parser for types, terms and judgments.
//!
//! Precedence, loosest first: `;`, then `lambda`/`new`/`while`/`if`, then `:=`,
//! comparisons, `+ -`, `* / %`, application, and prefix `! fst snd even`.

use thiserror::Error;

use super::{BinOp, Context, Term, Type, UnOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(u64),
    Ident(String),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

const KEYWORDS: &[&str] = &[
    "skip", "while", "do", "ifzero", "if", "then", "else", "lambda", "new", "in", "mkvar",
    "random", "diverge", "pair", "fst", "snd", "even", "nat", "comm", "var",
];

struct Lexer;

impl Lexer {
    fn run(src: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let chars: Vec<char> = src.chars().collect();
        let mut out = Vec::new();
        let (mut i, mut line, mut col) = (0, 1, 1);
        let err = |line, col, m: String| ParseError { line, col, message: m };
        while i < chars.len() {
            let c = chars[i];
            let (l0, c0) = (line, col);
            if c == '\n' {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            if c.is_whitespace() {
                i += 1;
                col += 1;
                continue;
            }
            if c == '#' {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                let n = s.parse().map_err(|_| err(l0, c0, format!("numeral {s} too large")))?;
                out.push((Tok::Num(n), l0, c0));
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = match s.as_str() {
                    "omega" | "\u{3a9}" => Tok::Kw("diverge"),
                    "div" => Tok::Sym("/"),
                    "mod" => Tok::Sym("%"),
                    _ => match KEYWORDS.iter().find(|k| **k == s) {
                        Some(k) => Tok::Kw(k),
                        None => Tok::Ident(s),
                    },
                };
                // Unicode sugar is handled below; plain words end here.
                out.push((tok, l0, c0));
                continue;
            }
            let next = chars.get(i + 1).copied();
            let after = chars.get(i + 2).copied();
            let sym: Option<(&'static str, usize)> = match c {
                ':' if next == Some('=') => Some((":=", 2)),
                '|' if next == Some('-') => Some(("|-", 2)),
                '[' if next == Some('-') && after == Some(']') => Some(("[-]", 3)),
                '-' if next == Some('o') && !after.is_some_and(|a| a.is_alphanumeric() || a == '_') => {
                    Some(("-o", 2))
                }
                '-' | '\u{2212}' => Some(("-", 1)),
                '\u{22b8}' => Some(("-o", 1)),
                '\u{22a2}' => Some(("|-", 1)),
                '\u{3bb}' | '\\' => Some(("\\", 1)),
                ';' => Some((";", 1)),
                ':' => Some((":", 1)),
                '!' => Some(("!", 1)),
                '(' => Some(("(", 1)),
                ')' => Some((")", 1)),
                ',' => Some((",", 1)),
                '.' => Some((".", 1)),
                '+' => Some(("+", 1)),
                '*' => Some(("*", 1)),
                '/' => Some(("/", 1)),
                '%' => Some(("%", 1)),
                '=' => Some(("=", 1)),
                '<' => Some(("<", 1)),
                _ => None,
            };
            match sym {
                Some((s, n)) => {
                    i += n;
                    col += n;
                    out.push((Tok::Sym(s), l0, c0));
                }
                None if c == '\u{3a9}' => {
                    i += 1;
                    col += 1;
                    out.push((Tok::Kw("diverge"), l0, c0));
                }
                None => return Err(err(l0, c0, format!("unexpected character '{c}'"))),
            }
        }
        out.push((Tok::Eof, line, col));
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Parser> {
        Ok(Parser { toks: Lexer::run(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let (_, line, col) = self.toks[self.pos];
        Err(ParseError { line, col, message: message.into() })
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Num(n) => format!("numeral {n}"),
            Tok::Ident(x) => format!("identifier '{x}'"),
            Tok::Kw(k) => format!("keyword '{k}'"),
            Tok::Sym(s) => format!("'{s}'"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == k)
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected '{s}', found {}", Self::describe(self.peek())))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected '{k}', found {}", Self::describe(self.peek())))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            t => self.error(format!("expected identifier, found {}", Self::describe(&t))),
        }
    }

    fn eof(&self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => self.error(format!("unexpected {}", Self::describe(t))),
        }
    }

    fn ty(&mut self) -> PResult<Type> {
        let a = match self.bump() {
            Tok::Kw("nat") => Type::Nat,
            Tok::Kw("comm") => Type::Comm,
            Tok::Kw("var") => Type::Var,
            Tok::Sym("(") => {
                let t = self.ty()?;
                self.expect_sym(")")?;
                t
            }
            t => {
                if !matches!(t, Tok::Eof) {
                    self.pos -= 1;
                }
                return self.error(format!("expected a type, found {}", Self::describe(&t)));
            }
        };
        if self.is_sym("-o") {
            self.bump();
            Ok(Type::arrow(a, self.ty()?))
        } else {
            Ok(a)
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let a = self.stmt()?;
        if self.is_sym(";") {
            self.bump();
            Ok(Term::seq(a, self.term()?))
        } else {
            Ok(a)
        }
    }

    fn stmt(&mut self) -> PResult<Term> {
        if self.is_kw("lambda") || self.is_sym("\\") {
            self.bump();
            let x = self.ident()?;
            self.expect_sym(":")?;
            let ty = self.ty()?;
            self.expect_sym(".")?;
            return Ok(Term::lambda(&x, ty, self.term()?));
        }
        if self.is_kw("new") {
            self.bump();
            let x = self.ident()?;
            self.expect_kw("in")?;
            return Ok(Term::new_var(&x, self.term()?));
        }
        if self.is_kw("while") {
            self.bump();
            let g = self.term()?;
            self.expect_kw("do")?;
            return Ok(Term::while_(g, self.stmt()?));
        }
        if self.is_kw("ifzero") || self.is_kw("if") {
            let zero = self.is_kw("ifzero");
            self.bump();
            let g = self.term()?;
            self.expect_kw("then")?;
            let t = self.term()?;
            self.expect_kw("else")?;
            let e = self.stmt()?;
            return Ok(if zero { Term::ifzero(g, t, e) } else { Term::if_(g, t, e) });
        }
        let lhs = self.expr()?;
        if self.is_sym(":=") {
            self.bump();
            Ok(Term::assign(lhs, self.expr()?))
        } else {
            Ok(lhs)
        }
    }

    fn expr(&mut self) -> PResult<Term> {
        let a = self.additive()?;
        let op = if self.is_sym("=") {
            BinOp::Eq
        } else if self.is_sym("<") {
            BinOp::Lt
        } else {
            return Ok(a);
        };
        self.bump();
        Ok(Term::bin(op, a, self.additive()?))
    }

    fn additive(&mut self) -> PResult<Term> {
        let mut a = self.mult()?;
        loop {
            let op = if self.is_sym("+") {
                BinOp::Add
            } else if self.is_sym("-") {
                BinOp::Monus
            } else {
                return Ok(a);
            };
            self.bump();
            a = Term::bin(op, a, self.mult()?);
        }
    }

    fn mult(&mut self) -> PResult<Term> {
        let mut a = self.app()?;
        loop {
            let op = if self.is_sym("*") {
                BinOp::Mul
            } else if self.is_sym("/") {
                BinOp::Div
            } else if self.is_sym("%") {
                BinOp::Mod
            } else {
                return Ok(a);
            };
            self.bump();
            a = Term::bin(op, a, self.app()?);
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Num(_) | Tok::Ident(_) => true,
            Tok::Kw(k) => matches!(*k, "skip" | "random" | "diverge" | "mkvar" | "pair" | "fst" | "snd" | "even"),
            Tok::Sym(s) => matches!(*s, "(" | "!" | "[-]"),
            Tok::Eof => false,
        }
    }

    fn app(&mut self) -> PResult<Term> {
        let mut f = self.atom()?;
        while self.starts_atom() {
            f = Term::app(f, self.atom()?);
        }
        Ok(f)
    }

    fn pair_args(&mut self) -> PResult<(Term, Term)> {
        self.expect_sym("(")?;
        let a = self.term()?;
        self.expect_sym(",")?;
        let b = self.term()?;
        self.expect_sym(")")?;
        Ok((a, b))
    }

    fn atom(&mut self) -> PResult<Term> {
        match self.bump() {
            Tok::Num(n) => Ok(Term::Num(n)),
            Tok::Ident(x) => Ok(Term::Ident(x)),
            Tok::Kw("skip") => Ok(Term::Skip),
            Tok::Kw("random") => Ok(Term::Random),
            Tok::Kw("diverge") => Ok(Term::diverge()),
            Tok::Kw("mkvar") => {
                let (w, r) = self.pair_args()?;
                Ok(Term::mkvar(w, r))
            }
            Tok::Kw("pair") => {
                let (a, b) = self.pair_args()?;
                Ok(Term::bin(BinOp::Pair, a, b))
            }
            Tok::Kw("fst") => Ok(Term::un(UnOp::Fst, self.atom()?)),
            Tok::Kw("snd") => Ok(Term::un(UnOp::Snd, self.atom()?)),
            Tok::Kw("even") => Ok(Term::un(UnOp::Even, self.atom()?)),
            Tok::Sym("!") => Ok(Term::deref(self.atom()?)),
            Tok::Sym("[-]") => Ok(Term::Hole),
            Tok::Sym("(") => {
                let t = self.term()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            t => {
                if !matches!(t, Tok::Eof) {
                    self.pos -= 1;
                }
                self.error(format!("expected a term, found {}", Self::describe(&t)))
            }
        }
    }

    fn context(&mut self) -> PResult<Context> {
        let mut entries = Vec::new();
        while !self.is_sym("|-") {
            if !entries.is_empty() {
                self.expect_sym(",")?;
            }
            let x = self.ident()?;
            self.expect_sym(":")?;
            entries.push((x, self.ty()?));
        }
        self.bump();
        match Context::from_entries(entries) {
            Some(c) => Ok(c),
            None => self.error("duplicate identifier in context"),
        }
    }
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.eof()?;
    Ok(t)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.eof()?;
    Ok(t)
}

/// Parses `x:A, y:B |- M`. Without a turnstile the context is empty.
pub fn parse_judgment(src: &str) -> Result<(Context, Term), ParseError> {
    let mut p = Parser::new(src)?;
    let has_turnstile = p.toks.iter().any(|(t, _, _)| *t == Tok::Sym("|-"));
    let ctx = if has_turnstile { p.context()? } else { Context::new() };
    let t = p.term()?;
    p.eof()?;
    Ok((ctx, t))
}
