//! Reduction engine: redex search, rule application and normalization.

mod graph;
mod rules;

use std::fmt;

use crate::proofnet::{absorb_neutral, CellId, Fresh, Net, NetSum, PortId};

pub use graph::{reduction_graph, ReductionGraph};

/// Default step budget per summand lineage.
pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    M,
    E,
    D,
    Er,
    C,
    Nd,
    Ba,
    S1,
    S2,
    EpsWw,
    ZeroWd,
}

impl Rule {
    pub const ALL: [Rule; 11] = [
        Rule::M,
        Rule::E,
        Rule::D,
        Rule::Er,
        Rule::C,
        Rule::Nd,
        Rule::Ba,
        Rule::S1,
        Rule::S2,
        Rule::EpsWw,
        Rule::ZeroWd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::M => "m",
            Rule::E => "e",
            Rule::D => "d",
            Rule::Er => "er",
            Rule::C => "c",
            Rule::Nd => "nd",
            Rule::Ba => "ba",
            Rule::S1 => "s1",
            Rule::S2 => "s2",
            Rule::EpsWw => "eps_ww",
            Rule::ZeroWd => "zero_wd",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A reducible site. `cells` lists the two cells in rule order (e.g. tensor then
/// par, dereliction then box, outer box then inner box for c); `wire` is the
/// smaller port of the cut wire; `path` lists the enclosing boxes, outermost first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub rule: Rule,
    pub cells: Vec<CellId>,
    pub wire: PortId,
    pub depth: usize,
    pub path: Vec<CellId>,
}

impl Redex {
    fn order_key(&self) -> (usize, CellId, PortId) {
        (self.depth, self.cells.iter().copied().min().unwrap_or(0), self.wire)
    }
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.cells.iter().map(|c| c.to_string()).collect();
        write!(f, "{} {} {}@{}", self.depth, self.rule, cells.join(","), self.wire)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Every rule, at depth 0.
    SurfaceOnly,
    /// e and er strictly inside boxes.
    AnyDepthEEr,
    All,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum RewriteError {
    #[error("stale redex: {0}")]
    StaleRedex(String),
    #[error("budget of {budget} steps exhausted")]
    BudgetExhausted { budget: usize, partial: NetSum },
}

fn collect(n: &Net, path: &mut Vec<CellId>, keep: &dyn Fn(Rule, usize) -> bool, out: &mut Vec<Redex>) {
    let depth = path.len();
    for w in n.wires() {
        if let Some((rule, cells)) = rules::classify(n, w.a, w.b) {
            if keep(rule, depth) {
                out.push(Redex {
                    rule,
                    cells,
                    wire: w.a,
                    depth,
                    path: path.clone(),
                });
            }
        }
    }
    for c in n.cells() {
        if let Some(inner) = c.inner.as_deref() {
            path.push(c.id);
            collect(inner, path, keep, out);
            path.pop();
        }
    }
}

fn search(n: &Net, keep: &dyn Fn(Rule, usize) -> bool) -> Vec<Redex> {
    let mut out = Vec::new();
    collect(n, &mut Vec::new(), keep, &mut out);
    out.sort_by_key(Redex::order_key);
    out
}

/// Redexes allowed by `policy`, ordered by (depth, smallest cell id, wire).
pub fn find_redexes(n: &Net, policy: Policy) -> Vec<Redex> {
    let inner = |r: Rule, d: usize| d > 0 && matches!(r, Rule::E | Rule::Er);
    match policy {
        Policy::SurfaceOnly => search(n, &|_, d| d == 0),
        Policy::AnyDepthEEr => search(n, &inner),
        Policy::All => search(n, &|r, d| d == 0 || inner(r, d)),
    }
}

fn net_at_mut<'a>(n: &'a mut Net, path: &[CellId]) -> Option<&'a mut Net> {
    match path.split_first() {
        None => Some(n),
        Some((b, rest)) => net_at_mut(n.cell_mut(*b)?.inner.as_deref_mut()?, rest),
    }
}

fn net_at<'a>(n: &'a Net, path: &[CellId]) -> Option<&'a Net> {
    match path.split_first() {
        None => Some(n),
        Some((b, rest)) => net_at(n.cell(*b)?.inner.as_deref()?, rest),
    }
}

fn still_matches(n: &Net, r: &Redex) -> bool {
    let Some(local) = net_at(n, &r.path) else {
        return false;
    };
    let Some(peer) = local.peer(r.wire) else {
        return false;
    };
    matches!(rules::classify(local, r.wire, peer), Some((rule, cells)) if rule == r.rule && cells == r.cells)
}

/// Reducts of `n` at `r` as a plain list (no deduplication).
pub fn apply_raw(n: &Net, r: &Redex) -> Result<Vec<Net>, RewriteError> {
    if !still_matches(n, r) {
        return Err(RewriteError::StaleRedex(r.to_string()));
    }
    let mut fresh = Fresh::above(n);
    let (x, y) = (r.cells[0], r.cells[1]);
    let branch = |pick: usize, fresh: &mut Fresh| {
        let mut out = n.clone();
        let local = net_at_mut(&mut out, &r.path).unwrap();
        rules::nd(local, x, y, pick, fresh);
        out
    };
    match r.rule {
        Rule::ZeroWd => Ok(Vec::new()),
        Rule::Nd => {
            let a = branch(0, &mut fresh);
            let b = branch(1, &mut fresh);
            Ok(vec![a, b])
        }
        rule => {
            let mut out = n.clone();
            let local = net_at_mut(&mut out, &r.path).unwrap();
            match rule {
                Rule::M => rules::m(local, x, y),
                Rule::E => rules::e(local, x, y),
                Rule::D => rules::d(local, x, y, &mut fresh),
                Rule::Er | Rule::EpsWw => rules::erase(local, x, y),
                Rule::C => rules::c(local, x, y),
                Rule::Ba => rules::ba(local, x, y, &mut fresh),
                Rule::S1 | Rule::S2 => rules::spread(local, x, y, &mut fresh),
                Rule::Nd | Rule::ZeroWd => unreachable!(),
            }
            Ok(vec![out])
        }
    }
}

/// Reducts of `n` at `r`; nd gives two summands, zero_wd the zero sum.
pub fn apply(n: &Net, r: &Redex) -> Result<NetSum, RewriteError> {
    Ok(apply_raw(n, r)?.into_iter().collect())
}

/// Normalization settings.
#[derive(Clone, Copy, Debug)]
pub struct Strategy {
    /// Steps allowed along each summand lineage.
    pub budget: usize,
    /// Fire the highest-ordered redex instead of the lowest.
    pub reversed: bool,
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy {
            budget: DEFAULT_BUDGET,
            reversed: false,
        }
    }
}

fn next_redex(n: &Net, reversed: bool) -> Option<Redex> {
    let pick = |mut v: Vec<Redex>| if reversed { v.pop() } else { v.into_iter().next() };
    pick(find_redexes(n, Policy::SurfaceOnly)).or_else(|| pick(find_redexes(n, Policy::AnyDepthEEr)))
}

fn run(
    s: &NetSum,
    strat: Strategy,
    mut trace: Option<&mut Vec<String>>,
    next: &dyn Fn(&Net) -> Option<Redex>,
) -> Result<NetSum, RewriteError> {
    let mut done = NetSum::zero();
    let mut work: Vec<(Net, usize)> = s.nets().rev().map(|n| (n.clone(), 0)).collect();
    while let Some((mut n, steps)) = work.pop() {
        absorb_neutral(&mut n);
        let Some(r) = next(&n) else {
            done.push(n);
            continue;
        };
        if steps >= strat.budget {
            let mut partial = done;
            partial.push(n);
            partial.extend(work.into_iter().map(|(n, _)| n).collect());
            return Err(RewriteError::BudgetExhausted {
                budget: strat.budget,
                partial,
            });
        }
        let out = apply_raw(&n, &r)?;
        if let Some(t) = trace.as_deref_mut() {
            t.push(format!("{r} -> {} summands", out.len()));
        }
        for m in out.into_iter().rev() {
            work.push((m, steps + 1));
        }
    }
    Ok(done)
}

/// Normal form under the surface-first strategy, with the default order.
pub fn normalize(s: &NetSum, budget: usize) -> Result<NetSum, RewriteError> {
    normalize_with(
        s,
        Strategy {
            budget,
            reversed: false,
        },
        None,
    )
}

/// Normal form, optionally logging one line per step: `depth rule cells@wire -> k summands`.
pub fn normalize_with(s: &NetSum, strat: Strategy, trace: Option<&mut Vec<String>>) -> Result<NetSum, RewriteError> {
    run(s, strat, trace, &|n| next_redex(n, strat.reversed))
}

/// Normal form followed by every deterministic rule at any depth (all but nd and zero_wd),
/// so that nets differing only in unevaluated box contents compare equal.
pub fn deep_normalize(s: &NetSum, budget: usize) -> Result<NetSum, RewriteError> {
    let surface = normalize(s, budget)?;
    let strat = Strategy {
        budget,
        reversed: false,
    };
    run(&surface, strat, None, &|n| {
        next_redex(n, false).or_else(|| {
            search(n, &|r, _| !matches!(r, Rule::Nd | Rule::ZeroWd))
                .into_iter()
                .next()
        })
    })
}
