//! Demand-driven enumeration of trace relations.
//!
//! A term is run against a question from its environment. Context
//! identifiers are played by the environment: every answer it gives is
//! recorded as an event on that identifier's trace. Call-by-name arguments
//! are closures, local variables are cells, and every nondeterministic
//! choice (environment answers, `random`, loop exits) forks the state.

use std::cell::Cell;
use std::rc::Rc;

use crate::bounds::Bounds;
use crate::events::{Event, Trace};
use crate::syntax::{Term, Type};

use super::DenoteError;

#[derive(Clone)]
pub(crate) enum Binding<'a> {
    /// Played by the environment; events go to buffer `buf`.
    Env { buf: usize, ty: Type },
    /// A local variable.
    Cell(usize),
    /// A variable whose value lives in `cell` and whose events are recorded.
    Tracked { buf: usize, cell: usize },
    /// A call-by-name argument.
    Thunk(&'a Term, Env<'a>),
    Num(u64),
}

pub(crate) type Env<'a> = Option<Rc<EnvNode<'a>>>;

pub(crate) struct EnvNode<'a> {
    name: &'a str,
    binding: Binding<'a>,
    next: Env<'a>,
}

pub(crate) fn extend<'a>(env: &Env<'a>, name: &'a str, binding: Binding<'a>) -> Env<'a> {
    Some(Rc::new(EnvNode { name, binding, next: env.clone() }))
}

fn lookup<'e, 'a>(mut env: &'e Env<'a>, name: &str) -> Option<&'e Binding<'a>> {
    while let Some(node) = env {
        if node.name == name {
            return Some(&node.binding);
        }
        env = &node.next;
    }
    None
}

#[derive(Clone)]
pub(crate) enum Q<'a> {
    Nat,
    Run,
    Read,
    Write(u64),
    Apply(Binding<'a>, Box<Q<'a>>),
}

/// A question before fresh buffers are allocated for its arguments.
#[derive(Clone, Debug)]
pub(crate) enum Shape {
    Nat,
    Run,
    Read,
    Write(u64),
    Apply(Type, Box<Shape>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Ans {
    Num(u64),
    Done,
}

#[derive(Clone)]
pub(crate) struct Buf {
    pub trace: Trace,
    pub limit: usize,
}

#[derive(Clone, Default)]
pub(crate) struct St {
    pub bufs: Vec<Buf>,
    pub cells: Vec<u64>,
}

type Res<T> = Result<T, DenoteError>;

pub(crate) struct Engine {
    pub bounds: Bounds,
    /// Set when some branch was cut by the loop-unfolding limit.
    pub truncated: Cell<bool>,
}

fn internal<T>(what: &str) -> Res<T> {
    Err(DenoteError::Internal(what.to_string()))
}

impl Engine {
    pub fn new(bounds: Bounds) -> Engine {
        Engine { bounds, truncated: Cell::new(false) }
    }

    pub fn shapes(&self, ty: &Type) -> Vec<Shape> {
        match ty {
            Type::Nat => vec![Shape::Nat],
            Type::Comm => vec![Shape::Run],
            Type::Var => std::iter::once(Shape::Read).chain((0..=self.bounds.max_nat).map(Shape::Write)).collect(),
            Type::Arrow(a, b) => {
                self.shapes(b).into_iter().map(|s| Shape::Apply((**a).clone(), Box::new(s))).collect()
            }
        }
    }

    pub fn instantiate<'a>(&self, shape: &Shape, st: &mut St) -> Q<'a> {
        match shape {
            Shape::Nat => Q::Nat,
            Shape::Run => Q::Run,
            Shape::Read => Q::Read,
            Shape::Write(n) => Q::Write(*n),
            Shape::Apply(a, s) => {
                let buf = st.bufs.len();
                st.bufs.push(Buf { trace: vec![], limit: self.bounds.max_arg_len });
                Q::Apply(Binding::Env { buf, ty: a.clone() }, Box::new(self.instantiate(s, st)))
            }
        }
    }

    pub fn event_of(&self, q: &Q<'_>, ans: Ans, st: &St) -> Res<Event> {
        Ok(match (q, ans) {
            (Q::Run, Ans::Done) => Event::Star,
            (Q::Nat, Ans::Num(n)) => Event::Nat(n),
            (Q::Read, Ans::Num(n)) => Event::Read(n),
            (Q::Write(n), Ans::Done) => Event::Write(*n),
            (Q::Apply(Binding::Env { buf, .. }, q2), a) => {
                Event::fun(st.bufs[*buf].trace.clone(), self.event_of(q2, a, st)?)
            }
            _ => return internal("answer does not fit question"),
        })
    }

    fn record(&self, buf: usize, ev: Event, mut st: St) -> Option<St> {
        let b = &mut st.bufs[buf];
        if b.trace.len() >= b.limit {
            return None;
        }
        b.trace.push(ev);
        Some(st)
    }

    fn nat<'a>(&self, m: &'a Term, env: &Env<'a>, st: St) -> Res<Vec<(u64, St)>> {
        self.run(m, env, &Q::Nat, st)?
            .into_iter()
            .map(|(a, s)| match a {
                Ans::Num(n) => Ok((n, s)),
                Ans::Done => internal("command where a number was expected"),
            })
            .collect()
    }

    fn comm<'a>(&self, m: &'a Term, env: &Env<'a>, st: St) -> Res<Vec<St>> {
        Ok(self.run(m, env, &Q::Run, st)?.into_iter().map(|(_, s)| s).collect())
    }

    pub fn run<'a>(&self, m: &'a Term, env: &Env<'a>, q: &Q<'a>, st: St) -> Res<Vec<(Ans, St)>> {
        let mut out = Vec::new();
        match m {
            Term::Num(n) => out.push((Ans::Num(*n), st)),
            Term::Skip => out.push((Ans::Done, st)),
            Term::Hole => return internal("hole"),
            Term::Random => {
                for n in 0..=self.bounds.random_max() {
                    out.push((Ans::Num(n), st.clone()));
                }
            }
            Term::Bin(op, a, b) => {
                for (n1, s1) in self.nat(a, env, st)? {
                    for (n2, s2) in self.nat(b, env, s1)? {
                        out.push((Ans::Num(op.apply(n1, n2).ok_or(DenoteError::Overflow)?), s2));
                    }
                }
            }
            Term::Un(op, a) => {
                for (n, s1) in self.nat(a, env, st)? {
                    out.push((Ans::Num(op.apply(n)), s1));
                }
            }
            Term::Seq(a, b) => {
                for s1 in self.comm(a, env, st)? {
                    out.extend(self.run(b, env, q, s1)?);
                }
            }
            Term::Assign(target, value) => {
                for (n, s1) in self.nat(value, env, st)? {
                    for (_, s2) in self.run(target, env, &Q::Write(n), s1)? {
                        out.push((Ans::Done, s2));
                    }
                }
            }
            Term::Deref(a) => out = self.run(a, env, &Q::Read, st)?,
            Term::While(g, body) => {
                let mut frontier = vec![st];
                let mut unfolds = 0;
                while !frontier.is_empty() {
                    let mut next = Vec::new();
                    for s0 in frontier {
                        for (n, s1) in self.nat(g, env, s0)? {
                            if n != 0 {
                                out.push((Ans::Done, s1));
                            } else if unfolds == self.bounds.max_while_unfold {
                                self.truncated.set(true);
                            } else {
                                next.extend(self.comm(body, env, s1)?);
                            }
                        }
                    }
                    unfolds += 1;
                    frontier = next;
                }
            }
            Term::IfZero(g, a, b) => {
                for (n, s1) in self.nat(g, env, st)? {
                    out.extend(self.run(if n == 0 { a } else { b }, env, q, s1)?);
                }
            }
            Term::Ident(x) => match lookup(env, x) {
                Some(b) => out = self.answer(&b.clone(), q, st)?,
                None => return Err(DenoteError::Precondition(format!("unbound identifier `{x}`"))),
            },
            Term::Lambda(x, _, body) => match q {
                Q::Apply(arg, q2) => out = self.run(body, &extend(env, x, arg.clone()), q2, st)?,
                _ => return internal("non-application question to a function"),
            },
            Term::App(f, a) => {
                let q2 = Q::Apply(Binding::Thunk(a, env.clone()), Box::new(q.clone()));
                out = self.run(f, env, &q2, st)?;
            }
            Term::New(x, body) => {
                let mut s0 = st;
                let cell = s0.cells.len();
                s0.cells.push(0);
                for (a, mut s1) in self.run(body, &extend(env, x, Binding::Cell(cell)), q, s0)? {
                    s1.cells.truncate(cell);
                    out.push((a, s1));
                }
            }
            Term::Mkvar(w, r) => match q {
                Q::Write(n) => {
                    let call = Q::Apply(Binding::Num(*n), Box::new(Q::Run));
                    for (_, s1) in self.run(w, env, &call, st)? {
                        out.push((Ans::Done, s1));
                    }
                }
                Q::Read => out = self.run(r, env, &Q::Nat, st)?,
                _ => return internal("bad question to mkvar"),
            },
        }
        Ok(out)
    }

    /// Answers `q` on behalf of whatever `b` denotes.
    fn answer<'a>(&self, b: &Binding<'a>, q: &Q<'a>, mut st: St) -> Res<Vec<(Ans, St)>> {
        match (b, q) {
            (Binding::Thunk(t, env), _) => self.run(t, env, q, st),
            (Binding::Num(n), Q::Nat) => Ok(vec![(Ans::Num(*n), st)]),
            (Binding::Cell(c), Q::Read) => Ok(vec![(Ans::Num(st.cells[*c]), st)]),
            (Binding::Cell(c), Q::Write(n)) => {
                st.cells[*c] = *n;
                Ok(vec![(Ans::Done, st)])
            }
            (Binding::Tracked { buf, cell }, Q::Read) => {
                let v = st.cells[*cell];
                Ok(self.record(*buf, Event::Read(v), st).map(|s| (Ans::Num(v), s)).into_iter().collect())
            }
            (Binding::Tracked { buf, cell }, Q::Write(n)) => {
                st.cells[*cell] = *n;
                Ok(self.record(*buf, Event::Write(*n), st).map(|s| (Ans::Done, s)).into_iter().collect())
            }
            (Binding::Env { buf, ty }, _) => Ok(self
                .environment_move(ty, q, st)?
                .into_iter()
                .filter_map(|(ev, a, s)| self.record(*buf, ev, s).map(|s| (a, s)))
                .collect()),
            _ => internal("question does not fit binding"),
        }
    }

    /// Every way the environment can answer `q` as an object of type `ty`,
    /// with the event it produces.
    fn environment_move<'a>(&self, ty: &Type, q: &Q<'a>, st: St) -> Res<Vec<(Event, Ans, St)>> {
        let ns = 0..=self.bounds.max_nat;
        Ok(match (ty, q) {
            (Type::Comm, Q::Run) => vec![(Event::Star, Ans::Done, st)],
            (Type::Nat, Q::Nat) => ns.map(|n| (Event::Nat(n), Ans::Num(n), st.clone())).collect(),
            (Type::Var, Q::Read) => ns.map(|n| (Event::Read(n), Ans::Num(n), st.clone())).collect(),
            (Type::Var, Q::Write(n)) => vec![(Event::Write(*n), Ans::Done, st)],
            (Type::Arrow(a, b), Q::Apply(arg, q2)) => {
                // Interrogate the argument up to the length bound, then answer.
                let shapes = self.shapes(a);
                let mut partial: Vec<(Trace, St)> = vec![(vec![], st)];
                let mut out = Vec::new();
                for round in 0..=self.bounds.max_arg_len {
                    for (evs, s) in &partial {
                        for (eb, ans, s2) in self.environment_move(b, q2, s.clone())? {
                            out.push((Event::fun(evs.clone(), eb), ans, s2));
                        }
                    }
                    if round == self.bounds.max_arg_len {
                        break;
                    }
                    let mut next = Vec::new();
                    for (evs, s) in partial {
                        for shape in &shapes {
                            let mut s1 = s.clone();
                            let qi = self.instantiate(shape, &mut s1);
                            for (ans, s2) in self.answer(arg, &qi, s1)? {
                                let mut evs2 = evs.clone();
                                evs2.push(self.event_of(&qi, ans, &s2)?);
                                next.push((evs2, s2));
                            }
                        }
                    }
                    partial = next;
                }
                out
            }
            _ => return internal("question does not fit environment type"),
        })
    }
}
