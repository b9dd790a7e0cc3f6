//! Events, traces, bounded alphabets, state transitions and the
//! coherence and read/write orders on traces.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::bounds::Bounds;
use crate::syntax::Type;

/// One observable action at some type.
///
/// The derived order puts writes before reads; it is the canonical
/// order used for sorting denotations and picking witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    Nat(u64),
    Star,
    Write(u64),
    Read(u64),
    /// A function use: the argument's trace and the result event.
    Fun(Trace, Box<Event>),
}

pub type Trace = Vec<Event>;

/// Values of the context variables.
pub type Store = BTreeMap<String, u64>;

impl Event {
    pub fn fun(args: Trace, out: Event) -> Event {
        Event::Fun(args, Box::new(out))
    }

    /// Whether the event belongs to the alphabet of `ty`.
    pub fn conforms(&self, ty: &Type) -> bool {
        match (self, ty) {
            (Event::Nat(_), Type::Nat) | (Event::Star, Type::Comm) => true,
            (Event::Read(_) | Event::Write(_), Type::Var) => true,
            (Event::Fun(s, b), Type::Arrow(a, bt)) => s.iter().all(|e| e.conforms(a)) && b.conforms(bt),
            _ => false,
        }
    }

    /// Largest natural mentioned anywhere in the event.
    pub fn max_nat(&self) -> u64 {
        match self {
            Event::Nat(n) | Event::Read(n) | Event::Write(n) => *n,
            Event::Star => 0,
            Event::Fun(s, b) => s.iter().map(Event::max_nat).max().unwrap_or(0).max(b.max_nat()),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Nat(n) => write!(f, "{n}"),
            Event::Star => f.write_str("*"),
            Event::Read(n) => write!(f, "R({n})"),
            Event::Write(n) => write!(f, "W({n})"),
            Event::Fun(s, b) => write!(f, "({}, {b})", TraceDisplay(s)),
        }
    }
}

/// Space-separated rendering of a trace; empty traces render as nothing.
pub struct TraceDisplay<'a>(pub &'a [Event]);

impl fmt::Display for TraceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad event syntax at offset {offset}: {message}")]
pub struct EventParseError {
    pub offset: usize,
    pub message: String,
}

struct EventParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl EventParser<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }
    fn err<T>(&self, m: &str) -> Result<T, EventParseError> {
        Err(EventParseError { offset: self.i, message: m.to_string() })
    }
    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            true
        } else {
            false
        }
    }
    fn num(&mut self) -> Result<u64, EventParseError> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return self.err("expected a numeral");
        }
        std::str::from_utf8(&self.s[start..self.i]).unwrap().parse().or_else(|_| self.err("numeral too large"))
    }
    fn at_event(&mut self) -> bool {
        self.ws();
        matches!(self.s.get(self.i), Some(b'0'..=b'9' | b'*' | b'R' | b'W' | b'('))
    }
    fn event(&mut self) -> Result<Event, EventParseError> {
        self.ws();
        match self.s.get(self.i) {
            Some(b'*') => {
                self.i += 1;
                Ok(Event::Star)
            }
            Some(c @ (b'R' | b'W')) => {
                let read = *c == b'R';
                self.i += 1;
                if !self.eat(b'(') {
                    return self.err("expected '('");
                }
                let n = self.num()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(if read { Event::Read(n) } else { Event::Write(n) })
            }
            Some(b'(') => {
                self.i += 1;
                let s = self.trace()?;
                if !self.eat(b',') {
                    return self.err("expected ','");
                }
                let b = self.event()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(Event::fun(s, b))
            }
            Some(b'0'..=b'9') => Ok(Event::Nat(self.num()?)),
            _ => self.err("expected an event"),
        }
    }
    fn trace(&mut self) -> Result<Trace, EventParseError> {
        let mut out = Vec::new();
        while self.at_event() {
            out.push(self.event()?);
        }
        Ok(out)
    }
    fn done(&mut self) -> Result<(), EventParseError> {
        self.ws();
        if self.i == self.s.len() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }
}

impl FromStr for Event {
    type Err = EventParseError;
    fn from_str(s: &str) -> Result<Event, EventParseError> {
        let mut p = EventParser { s: s.as_bytes(), i: 0 };
        let e = p.event()?;
        p.done()?;
        Ok(e)
    }
}

/// Parses a space-separated trace; brackets around it are optional.
pub fn parse_trace(s: &str) -> Result<Trace, EventParseError> {
    let t = s.trim();
    let t = t.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(t);
    let mut p = EventParser { s: t.as_bytes(), i: 0 };
    let tr = p.trace()?;
    p.done()?;
    Ok(tr)
}

impl Serialize for Event {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Event {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Event, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The bounded alphabet of a type, in canonical order.
pub fn alphabet(ty: &Type, bounds: &Bounds) -> Vec<Event> {
    let ns = 0..=bounds.max_nat;
    match ty {
        Type::Nat => ns.map(Event::Nat).collect(),
        Type::Comm => vec![Event::Star],
        Type::Var => ns.clone().map(Event::Write).chain(ns.map(Event::Read)).collect(),
        Type::Arrow(a, b) => {
            let args = traces(a, bounds, bounds.max_arg_len);
            let outs = alphabet(b, bounds);
            let mut v: Vec<Event> = args
                .iter()
                .flat_map(|s| outs.iter().map(move |o| Event::fun(s.clone(), o.clone())))
                .collect();
            v.sort();
            v
        }
    }
}

/// All traces over the bounded alphabet of `ty` with length at most `max_len`.
pub fn traces(ty: &Type, bounds: &Bounds, max_len: usize) -> Vec<Trace> {
    let alpha = alphabet(ty, bounds);
    let mut out = vec![vec![]];
    let mut frontier: Vec<Trace> = vec![vec![]];
    for _ in 0..max_len {
        let next: Vec<Trace> = frontier
            .iter()
            .flat_map(|t| {
                alpha.iter().map(move |e| {
                    let mut t = t.clone();
                    t.push(e.clone());
                    t
                })
            })
            .collect();
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Runs a variable trace from value `n`. Reads must see the current
/// value; writes replace it. `None` when a read disagrees or a non-variable
/// event appears.
pub fn strans(n: u64, s: &[Event]) -> Option<u64> {
    s.iter().try_fold(n, |cur, e| match e {
        Event::Read(m) if *m == cur => Some(cur),
        Event::Write(m) => Some(*m),
        _ => None,
    })
}

/// A trace that a freshly allocated cell could produce.
pub fn is_cell_trace(s: &[Event]) -> bool {
    strans(0, s).is_some()
}

/// Runs each component trace on the matching variable of `names`.
pub fn strans_all(sigma: &Store, names: &[&str], tup: &[Trace]) -> Option<Store> {
    let mut out = sigma.clone();
    for (name, s) in names.iter().zip(tup) {
        let v = out.get_mut(*name)?;
        *v = strans(*v, s)?;
    }
    Some(out)
}

/// `sigma -tup-> sigma2`, with components indexed by `names`.
pub fn strans_store(sigma: &Store, names: &[&str], tup: &[Trace], sigma2: &Store) -> bool {
    strans_all(sigma, names, tup).as_ref() == Some(sigma2)
}

/// Coherence of two events of type `ty`.
pub fn coherent_event(ty: &Type, a: &Event, b: &Event) -> bool {
    match ty {
        Type::Nat => a == b,
        Type::Comm => true,
        Type::Var => match (a, b) {
            (Event::Read(n), Event::Read(m)) => n == m,
            _ => true,
        },
        Type::Arrow(at, bt) => {
            let (Event::Fun(s, x), Event::Fun(t, y)) = (a, b) else {
                return false;
            };
            let args = coherent(at, s, t);
            (!args || coherent_event(bt, x, y)) && (!(args && x == y) || s == t)
        }
    }
}

/// Coherence of traces: one is a prefix of the other, or the first
/// differing events are coherent.
pub fn coherent(ty: &Type, s: &[Event], t: &[Event]) -> bool {
    match s.iter().zip(t).find(|(a, b)| a != b) {
        None => true,
        Some((a, b)) => coherent_event(ty, a, b),
    }
}

/// Positive read/write order on events: a read may be replaced by the
/// write of the same value in positive positions.
pub fn leq_plus_event(ty: &Type, a: &Event, b: &Event) -> bool {
    match (ty, a, b) {
        (Type::Var, Event::Read(n), Event::Write(m)) => n == m,
        (Type::Arrow(at, bt), Event::Fun(s, x), Event::Fun(t, y)) => {
            leq_minus(at, s, t) && leq_plus_event(bt, x, y)
        }
        _ => a == b,
    }
}

/// Negative read/write order on events.
pub fn leq_minus_event(ty: &Type, a: &Event, b: &Event) -> bool {
    match (ty, a, b) {
        (Type::Arrow(at, bt), Event::Fun(s, x), Event::Fun(t, y)) => {
            leq_plus(at, s, t) && leq_minus_event(bt, x, y)
        }
        _ => a == b,
    }
}

pub fn leq_plus(ty: &Type, s: &[Event], t: &[Event]) -> bool {
    s.len() == t.len() && s.iter().zip(t).all(|(a, b)| leq_plus_event(ty, a, b))
}

pub fn leq_minus(ty: &Type, s: &[Event], t: &[Event]) -> bool {
    s.len() == t.len() && s.iter().zip(t).all(|(a, b)| leq_minus_event(ty, a, b))
}
