//! Exhaustive non-deterministic evaluation of λ-amadio programs and the
//! embedding into lthis.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use super::syntax::{RefSubst, RegionCtx, TermA, TermL, TypeExpr};
use super::types::{typecheck_lthis, DNode, Derivation, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("budget of {budget} states exhausted")]
    BudgetExhausted { budget: usize },
}

/// A program up to associativity and commutativity of `∥`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct State {
    pub threads: Vec<TermA>,
    pub stores: Vec<(String, TermA)>,
}

impl State {
    pub fn of(p: &TermA) -> State {
        let mut s = State { threads: Vec::new(), stores: Vec::new() };
        s.add(p.clone());
        s.sort();
        s
    }

    fn add(&mut self, p: TermA) {
        match p {
            TermA::Par(a, b) => {
                self.add(*a);
                self.add(*b);
            }
            TermA::Store(r, v) => self.stores.push((r, *v)),
            t => self.threads.push(t),
        }
    }

    fn sort(&mut self) {
        self.threads.sort_by_cached_key(TermA::alpha_key);
        self.stores.sort_by_cached_key(|(r, v)| (r.clone(), v.alpha_key()));
    }

    /// Equal for programs equal up to α and the structural rules of `∥`.
    pub fn key(&self) -> String {
        let mut out = String::new();
        for t in &self.threads {
            out.push_str(&t.alpha_key());
            out.push_str(" || ");
        }
        for (r, v) in &self.stores {
            out.push_str(&format!("{r} <= {} || ", v.alpha_key()));
        }
        out
    }

    pub fn to_term(&self) -> Option<TermA> {
        let stores = self.stores.iter().map(|(r, v)| TermA::store(r, v.clone()));
        TermA::par_all(self.threads.iter().cloned().chain(stores))
    }

    pub fn is_final(&self) -> bool {
        self.threads.iter().all(TermA::is_value)
    }

    pub fn successors(&self) -> Vec<State> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (i, t) in self.threads.iter().enumerate() {
            for (nt, stored) in thread_steps(t, &self.stores) {
                let mut s = State { threads: Vec::new(), stores: self.stores.clone() };
                for (j, u) in self.threads.iter().enumerate() {
                    if j != i {
                        s.threads.push(u.clone());
                    }
                }
                s.add(nt);
                if let Some(b) = stored {
                    s.stores.push(b);
                }
                s.sort();
                if seen.insert(s.key()) {
                    out.push(s);
                }
            }
        }
        out
    }
}

/// Reducts of one thread at its unique evaluation position, with the store
/// binding a `set` adds.
fn thread_steps(t: &TermA, stores: &[(String, TermA)]) -> Vec<(TermA, Option<(String, TermA)>)> {
    match t {
        TermA::App(f, a) if !f.is_value() => thread_steps(f, stores)
            .into_iter()
            .map(|(f2, b)| (TermA::app(f2, (**a).clone()), b))
            .collect(),
        TermA::App(f, a) if !a.is_value() => thread_steps(a, stores)
            .into_iter()
            .map(|(a2, b)| (TermA::app((**f).clone(), a2), b))
            .collect(),
        TermA::App(f, a) => match &**f {
            TermA::Lam(x, body) => vec![(body.subst(x, a), None)],
            _ => Vec::new(),
        },
        TermA::Get(r) => stores.iter().filter(|(s, _)| s == r).map(|(_, v)| (v.clone(), None)).collect(),
        TermA::Set(r, v) => vec![(TermA::Star, Some((r.clone(), (**v).clone())))],
        _ => Vec::new(),
    }
}

/// All one-step reducts, deduplicated up to α and `∥` structure.
pub fn step(p: &TermA) -> Vec<TermA> {
    State::of(p).successors().iter().filter_map(State::to_term).collect()
}

/// One-step reducts that keep every thread at its place in the `∥` tree; a
/// written store is put in parallel with the whole program.
pub fn step_in_place(p: &TermA) -> Vec<TermA> {
    fn go(t: &TermA, stores: &[(String, TermA)], out: &mut Vec<(TermA, Option<(String, TermA)>)>) {
        match t {
            TermA::Par(a, b) => {
                let mut left = Vec::new();
                go(a, stores, &mut left);
                out.extend(left.into_iter().map(|(a2, s)| (TermA::par(a2, (**b).clone()), s)));
                let mut right = Vec::new();
                go(b, stores, &mut right);
                out.extend(right.into_iter().map(|(b2, s)| (TermA::par((**a).clone(), b2), s)));
            }
            TermA::Store(..) => {}
            t => out.extend(thread_steps(t, stores)),
        }
    }
    let stores = State::of(p).stores;
    let mut out = Vec::new();
    go(p, &stores, &mut out);
    out.into_iter()
        .map(|(q, s)| match s {
            Some((r, v)) => TermA::par(q, TermA::store(&r, v)),
            None => q,
        })
        .collect()
}

/// Multiset of thread values of a terminated run, sorted by α-key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Outcome {
    pub values: Vec<TermA>,
}

impl Outcome {
    pub fn key(&self) -> Vec<String> {
        self.values.iter().map(TermA::alpha_key).collect()
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Every state reachable from `p`, explored breadth-first.
pub fn reachable(p: &TermA, budget: usize) -> Result<Vec<State>, EvalError> {
    let start = State::of(p);
    let mut seen: BTreeSet<String> = BTreeSet::from([start.key()]);
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some(s) = queue.pop_front() {
        for n in s.successors() {
            if seen.insert(n.key()) {
                if seen.len() > budget {
                    return Err(EvalError::BudgetExhausted { budget });
                }
                queue.push_back(n);
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// Value outcomes of all terminated runs; stores are dropped, deadlocked runs contribute nothing.
pub fn values(p: &TermA, budget: usize) -> Result<Vec<Outcome>, EvalError> {
    let mut found: BTreeMap<Vec<String>, Outcome> = BTreeMap::new();
    for s in reachable(p, budget)? {
        if s.is_final() {
            let o = Outcome { values: s.threads.clone() };
            found.entry(o.key()).or_insert(o);
        }
    }
    Ok(found.into_values().collect())
}

/// Thread trees of terminated runs, stores removed, explored with [`step_in_place`]
/// so every thread stays at the place of the thread it comes from.
pub fn final_trees(p: &TermA, budget: usize) -> Result<Vec<TermA>, EvalError> {
    let key = |q: &TermA| {
        let threads = q.without_stores().map(|t| t.alpha_key()).unwrap_or_default();
        format!("{threads} with {}", State::of(q).key())
    };
    let mut seen: BTreeSet<String> = BTreeSet::from([key(p)]);
    let mut queue = VecDeque::from([p.clone()]);
    let mut found: BTreeMap<String, TermA> = BTreeMap::new();
    while let Some(q) = queue.pop_front() {
        let next = step_in_place(&q);
        if next.is_empty() && State::of(&q).is_final() {
            if let Some(t) = q.without_stores() {
                found.entry(t.alpha_key()).or_insert(t);
            }
        }
        for n in next {
            if seen.insert(key(&n)) {
                if seen.len() > budget {
                    return Err(EvalError::BudgetExhausted { budget });
                }
                queue.push_back(n);
            }
        }
    }
    Ok(found.into_values().collect())
}

/// `M̄^S`: the lthis term of thread tree `m` under stores `s`.
pub fn embed_lthis(r: &RegionCtx, m: &TermA, s: &[(String, TermA)]) -> Result<TermL, TypeError> {
    let plain = TermL::from_amadio(m).ok_or(TypeError::Rule { rule: "store", reason: "store inside a thread".into() })?;
    let d = typecheck_lthis(r, &Vec::new(), &plain)?;
    let mut vs = RefSubst::new();
    for (name, v) in s {
        let v = TermL::from_amadio(v).filter(TermL::is_value).ok_or(TypeError::Rule {
            rule: "store",
            reason: format!("stored term for {name} is not a value"),
        })?;
        vs.entry(name.clone()).or_default().push(v);
    }
    Ok(embed_derivation(&d, &vs))
}

fn restrict(vs: &RefSubst, keep: impl Fn(&str) -> bool) -> RefSubst {
    vs.iter().filter(|(r, _)| keep(r)).map(|(r, v)| (r.clone(), v.clone())).collect()
}

fn embed_derivation(d: &Derivation, vs: &RefSubst) -> TermL {
    match &d.node {
        DNode::App(s, f, a) if s.is_empty() => {
            let sub = match &f.ty {
                TypeExpr::Arrow(_, e1, _) => restrict(vs, |r| e1.contains(r)),
                _ => RefSubst::new(),
            };
            TermL::App(sub, Box::new(embed_derivation(f, vs)), Box::new(embed_derivation(a, vs)))
        }
        DNode::Get(r) => {
            let sub = restrict(vs, |s| s == r);
            if sub.is_empty() {
                TermL::Get(r.clone())
            } else {
                TermL::DownSubst(sub, Box::new(TermL::Get(r.clone())))
            }
        }
        DNode::Par(a, b) => TermL::Par(Box::new(embed_derivation(a, vs)), Box::new(embed_derivation(b, vs))),
        _ => d.term(),
    }
}

/// Thread part of a program embedded under its stores; `None` for a program of stores only.
pub fn embed_program(r: &RegionCtx, p: &TermA) -> Result<Option<TermL>, TypeError> {
    let st = State::of(p);
    match p.without_stores() {
        Some(m) => embed_lthis(r, &m, &st.stores).map(Some),
        None => Ok(None),
    }
}
