//! Finite monoid relations and the combinators that build the semantics.
//!
//! A map from `X1 ⊗ .. ⊗ Xn` to an object `Y` is given by its generators:
//! pairs of an input word per domain factor and a single output letter.
//! The full relation is the homomorphic extension, relating
//! componentwise concatenations of inputs to concatenated outputs.

use std::collections::{BTreeMap, BTreeSet};

use crate::bounds::Bounds;
use crate::events::{alphabet, traces, Event, Trace};
use crate::syntax::{Context, Term, Type};

use super::{denote, denote_words, Denotation, DenoteError, TraceTuple};

/// Letters of object-spaces: events of a type, or tagged letters of a product.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Ev(Event),
    Inl(Box<Letter>),
    Inr(Box<Letter>),
}

pub type Word = Vec<Letter>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Obj {
    Ty(Type),
    /// Product; its alphabet is the disjoint union.
    Prod(Box<Obj>, Box<Obj>),
}

impl Obj {
    pub fn prod(a: Obj, b: Obj) -> Obj {
        Obj::Prod(Box::new(a), Box::new(b))
    }

    pub fn alphabet(&self, bounds: &Bounds) -> Vec<Letter> {
        match self {
            Obj::Ty(t) => alphabet(t, bounds).into_iter().map(Letter::Ev).collect(),
            Obj::Prod(a, b) => a
                .alphabet(bounds)
                .into_iter()
                .map(|l| Letter::Inl(Box::new(l)))
                .chain(b.alphabet(bounds).into_iter().map(|l| Letter::Inr(Box::new(l))))
                .collect(),
        }
    }
}

pub fn word_of(t: &[Event]) -> Word {
    t.iter().cloned().map(Letter::Ev).collect()
}

fn trace_of(w: &[Letter]) -> Option<Trace> {
    w.iter()
        .map(|l| match l {
            Letter::Ev(e) => Some(e.clone()),
            _ => None,
        })
        .collect()
}

/// A map `dom[0] ⊗ .. ⊗ dom[n-1] -> cod`, by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Map {
    pub dom: Vec<Obj>,
    pub cod: Obj,
    pub gens: BTreeSet<(Vec<Word>, Letter)>,
}

impl Map {
    pub fn from_denotation(d: &Denotation) -> Map {
        Map {
            dom: d.ctx.types().cloned().map(Obj::Ty).collect(),
            cod: Obj::Ty(d.ty.clone()),
            gens: d.elems.iter().map(|t| (t.inputs.iter().map(|s| word_of(s)).collect(), Letter::Ev(t.out.clone()))).collect(),
        }
    }

    /// The generators as trace tuples; `None` if some letter is tagged.
    pub fn tuples(&self) -> Option<BTreeSet<TraceTuple>> {
        self.gens
            .iter()
            .map(|(ins, out)| {
                let inputs = ins.iter().map(|w| trace_of(w)).collect::<Option<Vec<_>>>()?;
                match out {
                    Letter::Ev(e) => Some(TraceTuple::new(inputs, e.clone())),
                    _ => None,
                }
            })
            .collect()
    }

    fn by_letter(&self) -> BTreeMap<&Letter, Vec<&Vec<Word>>> {
        let mut m: BTreeMap<&Letter, Vec<&Vec<Word>>> = BTreeMap::new();
        for (ins, l) in &self.gens {
            m.entry(l).or_default().push(ins);
        }
        m
    }

    /// Every input tuple the homomorphic extension relates to `word`.
    pub fn preimage(&self, word: &[Letter]) -> BTreeSet<Vec<Word>> {
        let index = self.by_letter();
        let mut acc: BTreeSet<Vec<Word>> = BTreeSet::from([vec![vec![]; self.dom.len()]]);
        for l in word {
            let Some(options) = index.get(l) else {
                return BTreeSet::new();
            };
            acc = acc
                .iter()
                .flat_map(|x| {
                    options.iter().map(move |y| {
                        x.iter().zip(y.iter()).map(|(a, b)| a.iter().chain(b).cloned().collect()).collect()
                    })
                })
                .collect();
        }
        acc
    }
}

/// Identity on an object, restricted to its bounded alphabet.
pub fn identity(obj: &Obj, bounds: &Bounds) -> Map {
    Map {
        dom: vec![obj.clone()],
        cod: obj.clone(),
        gens: obj.alphabet(bounds).into_iter().map(|l| (vec![vec![l.clone()]], l)).collect(),
    }
}

/// `(f1 ⊗ .. ⊗ fk) ; g`, where `fs[i]` lands in `g.dom[i]`. The domain of
/// the result is the concatenation of the domains of `fs`.
pub fn compose(fs: &[Map], g: &Map) -> Map {
    assert_eq!(fs.len(), g.dom.len(), "arity mismatch in composition");
    let mut gens = BTreeSet::new();
    for (ys, z) in &g.gens {
        let mut acc: Vec<Vec<Word>> = vec![vec![]];
        for (f, y) in fs.iter().zip(ys) {
            let pre = f.preimage(y);
            acc = acc
                .iter()
                .flat_map(|x| pre.iter().map(move |p| x.iter().chain(p).cloned().collect()))
                .collect();
        }
        for x in acc {
            gens.insert((x, z.clone()));
        }
    }
    Map { dom: fs.iter().flat_map(|f| f.dom.clone()).collect(), cod: g.cod.clone(), gens }
}

/// Binary composition.
pub fn compose_rel(f: &Map, g: &Map) -> Map {
    compose(std::slice::from_ref(f), g)
}

/// Pairing into a product: letters of `f` go left, of `g` right.
pub fn pair_rel(f: &Map, g: &Map) -> Map {
    assert_eq!(f.dom, g.dom, "pairing needs a shared domain");
    let gens = f
        .gens
        .iter()
        .map(|(x, l)| (x.clone(), Letter::Inl(Box::new(l.clone()))))
        .chain(g.gens.iter().map(|(x, l)| (x.clone(), Letter::Inr(Box::new(l.clone())))))
        .collect();
    Map { dom: f.dom.clone(), cod: Obj::prod(f.cod.clone(), g.cod.clone()), gens }
}

/// Projection out of a product; `left` picks the first factor.
pub fn proj_rel(a: &Obj, b: &Obj, left: bool, bounds: &Bounds) -> Map {
    let (keep, tag): (&Obj, fn(Box<Letter>) -> Letter) = if left { (a, Letter::Inl) } else { (b, Letter::Inr) };
    Map {
        dom: vec![Obj::prod(a.clone(), b.clone())],
        cod: keep.clone(),
        gens: keep.alphabet(bounds).into_iter().map(|l| (vec![vec![tag(Box::new(l.clone()))]], l)).collect(),
    }
}

/// Reorders the domain: factor `i` of the result is factor `perm[i]` of `f`.
pub fn symm_rel(f: &Map, perm: &[usize]) -> Map {
    Map {
        dom: perm.iter().map(|&i| f.dom[i].clone()).collect(),
        cod: f.cod.clone(),
        gens: f.gens.iter().map(|(x, l)| (perm.iter().map(|&i| x[i].clone()).collect(), l.clone())).collect(),
    }
}

/// `Γ ⊗ A -> B` to `Γ -> (A ⊸ B)`. Both `A` and `B` must be types.
pub fn curry_rel(f: &Map) -> Option<Map> {
    let (Some(Obj::Ty(a)), Obj::Ty(b)) = (f.dom.last(), &f.cod) else {
        return None;
    };
    let mut gens = BTreeSet::new();
    for (x, l) in &f.gens {
        let Letter::Ev(out) = l else { return None };
        let (last, rest) = x.split_last()?;
        gens.insert((rest.to_vec(), Letter::Ev(Event::fun(trace_of(last)?, out.clone()))));
    }
    Some(Map {
        dom: f.dom[..f.dom.len() - 1].to_vec(),
        cod: Obj::Ty(Type::arrow(a.clone(), b.clone())),
        gens,
    })
}

/// Inverse of [`curry_rel`].
pub fn uncurry_rel(f: &Map) -> Option<Map> {
    let Obj::Ty(Type::Arrow(a, b)) = &f.cod else { return None };
    let mut gens = BTreeSet::new();
    for (x, l) in &f.gens {
        let Letter::Ev(Event::Fun(s, out)) = l else { return None };
        let mut x = x.clone();
        x.push(word_of(s));
        gens.insert((x, Letter::Ev((**out).clone())));
    }
    let mut dom = f.dom.clone();
    dom.push(Obj::Ty((**a).clone()));
    Some(Map { dom, cod: Obj::Ty((**b).clone()), gens })
}

/// Application `(A ⊸ B) ⊗ A -> B`.
pub fn ev_rel(a: &Type, b: &Type, bounds: &Bounds) -> Map {
    let fun = Type::arrow(a.clone(), b.clone());
    let gens = alphabet(&fun, bounds)
        .into_iter()
        .filter_map(|e| match e.clone() {
            Event::Fun(s, out) => Some((vec![vec![Letter::Ev(e)], word_of(&s)], Letter::Ev(*out))),
            _ => None,
        })
        .collect();
    Map { dom: vec![Obj::Ty(fun), Obj::Ty(a.clone())], cod: Obj::Ty(b.clone()), gens }
}

/// The loop map `nat × comm -> comm`: any number of zero guards each
/// followed by a body run, then a nonzero guard.
pub fn while_map(bounds: &Bounds) -> Map {
    let zero = Letter::Inl(Box::new(Letter::Ev(Event::Nat(0))));
    let body = Letter::Inr(Box::new(Letter::Ev(Event::Star)));
    let mut gens = BTreeSet::new();
    for j in 0..=bounds.max_while_unfold {
        for n in 1..=bounds.max_nat {
            let mut w = Vec::new();
            for _ in 0..j {
                w.push(zero.clone());
                w.push(body.clone());
            }
            w.push(Letter::Inl(Box::new(Letter::Ev(Event::Nat(n)))));
            gens.insert((vec![w], Letter::Ev(Event::Star)));
        }
    }
    Map { dom: vec![Obj::prod(Obj::Ty(Type::Nat), Obj::Ty(Type::Comm))], cod: Obj::Ty(Type::Comm), gens }
}

/// Bounded argument traces for `ty`, used when enumerating identities on traces.
pub fn bounded_traces(ty: &Type, bounds: &Bounds) -> Vec<Trace> {
    traces(ty, bounds, bounds.max_trace_len)
}

/// Outcome of checking the structural laws of a relation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LawReport {
    pub homomorphism: Vec<String>,
    pub identity_reflection: Vec<String>,
    pub decomposition: Vec<String>,
    /// Pairs and words examined.
    pub checked: usize,
}

impl LawReport {
    pub fn holds(&self) -> bool {
        self.homomorphism.is_empty() && self.identity_reflection.is_empty() && self.decomposition.is_empty()
    }
}

fn concat(a: &[Trace], b: &[Trace]) -> Vec<Trace> {
    a.iter().zip(b).map(|(x, y)| x.iter().chain(y).cloned().collect()).collect()
}

/// Checks homomorphism, identity reflection and decomposition for the
/// relation of `ctx |- m : ty`, using two-question runs of the term
/// against its single-question denotation.
pub fn check_laws(ctx: &Context, m: &Term, ty: &Type, bounds: &Bounds) -> Result<LawReport, DenoteError> {
    let mut r = LawReport::default();
    let empty: Vec<Trace> = vec![vec![]; ctx.len()];
    let zero = denote_words(ctx, m, ty, bounds, 0)?;
    if zero != BTreeSet::from([(empty.clone(), vec![])]) {
        r.identity_reflection.push(format!("empty output relates to {} input tuples", zero.len()));
    }
    let single = denote(ctx, m, ty, bounds)?;
    let one = denote_words(ctx, m, ty, bounds, 1)?;
    let from_single: BTreeSet<_> = single.elems.iter().map(|t| (t.inputs.clone(), vec![t.out.clone()])).collect();
    if one != from_single {
        r.homomorphism.push("one-question runs disagree with the denotation".into());
    }
    let two = denote_words(ctx, m, ty, bounds, 2)?;
    let fits = |x: &[Trace]| x.iter().all(|s| s.len() <= bounds.max_trace_len);
    for a in &single.elems {
        for b in &single.elems {
            r.checked += 1;
            let x = concat(&a.inputs, &b.inputs);
            if fits(&x) && !two.contains(&(x.clone(), vec![a.out.clone(), b.out.clone()])) {
                r.homomorphism.push(format!("{a} then {b} has no joint run"));
            }
        }
    }
    for (x, w) in &two {
        r.checked += 1;
        if x == &empty && w.is_empty() {
            continue;
        }
        let found = splits(x).into_iter().any(|(u, v)| {
            single.contains(&TraceTuple::new(u, w[0].clone())) && single.contains(&TraceTuple::new(v, w[1].clone()))
        });
        if !found {
            r.decomposition.push(format!("{x:?} / {w:?} does not split"));
        }
    }
    Ok(r)
}

/// Every componentwise split of a tuple of traces into prefix and suffix.
fn splits(x: &[Trace]) -> Vec<(Vec<Trace>, Vec<Trace>)> {
    let mut acc: Vec<(Vec<Trace>, Vec<Trace>)> = vec![(vec![], vec![])];
    for s in x {
        acc = acc
            .into_iter()
            .flat_map(|(u, v)| {
                (0..=s.len()).map(move |k| {
                    let mut u = u.clone();
                    let mut v = v.clone();
                    u.push(s[..k].to_vec());
                    v.push(s[k..].to_vec());
                    (u, v)
                })
            })
            .collect();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denotational::denote_inferred;
    use crate::syntax::parse_judgment;

    fn map_of(src: &str, b: &Bounds) -> Map {
        let (ctx, m) = parse_judgment(src).unwrap();
        Map::from_denotation(&denote_inferred(&ctx, &m, b).unwrap())
    }

    #[test]
    fn identity_is_neutral() {
        let b = Bounds::new(1, 2, 2);
        let f = map_of("x:var, y:var |- x := !y", &b);
        let id = identity(&Obj::Ty(Type::Comm), &b);
        assert_eq!(compose_rel(&f, &id), f);
        let ids = [identity(&Obj::Ty(Type::Var), &b), identity(&Obj::Ty(Type::Var), &b)];
        assert_eq!(compose(&ids, &f), f);
    }

    #[test]
    fn curry_round_trip_and_evaluation() {
        let b = Bounds::new(1, 2, 2);
        let f = map_of("x:var, c:comm |- c; x := 1; c", &b);
        let lam = curry_rel(&f).unwrap();
        assert_eq!(uncurry_rel(&lam).unwrap(), f);
        let ev = ev_rel(&Type::Comm, &Type::Comm, &b);
        let back = compose(&[lam, identity(&Obj::Ty(Type::Comm), &b)], &ev);
        assert_eq!(back, f);
    }

    #[test]
    fn loop_as_composite_of_pairing() {
        let b = Bounds { max_while_unfold: 2, ..Bounds::new(1, 4, 2) };
        let guard = map_of("x:var |- !x", &b);
        let body = map_of("x:var |- x := 1", &b);
        let composite = compose_rel(&pair_rel(&guard, &body), &while_map(&b));
        let direct = map_of("x:var |- while !x do x := 1", &b);
        // The composite is not cut at the trace bound, so cut it here.
        let cut: BTreeSet<_> =
            composite.tuples().unwrap().into_iter().filter(|t| t.inputs[0].len() <= 4).collect();
        assert_eq!(Some(cut), direct.tuples());
    }

    #[test]
    fn projections_and_symmetry() {
        let b = Bounds::new(1, 2, 2);
        let f = map_of("x:var, y:var |- !x", &b);
        let g = map_of("x:var, y:var |- y := 0", &b);
        let p = pair_rel(&f, &g);
        let pf = compose_rel(&p, &proj_rel(&f.cod, &g.cod, true, &b));
        assert_eq!(pf, f);
        let swapped = symm_rel(&symm_rel(&f, &[1, 0]), &[1, 0]);
        assert_eq!(swapped, f);
    }

    #[test]
    fn laws_hold_for_swap() {
        let (ctx, m) = parse_judgment("x:var, y:var |- x := !y").unwrap();
        let r = check_laws(&ctx, &m, &Type::Comm, &Bounds::new(1, 4, 2)).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(r.checked > 0);
    }
}
