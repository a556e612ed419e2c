//! Alternating paths on box-free nets: acyclicity and free-to-free path counts.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::proofnet::{Net, PortId, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PathsError {
    #[error("net contains boxes")]
    HasBoxes,
    #[error("net contains a cyclic path")]
    CyclicNet,
    #[error("port {0} is not free")]
    NotFree(PortId),
}

/// Undirected graph on ports: one edge per wire, one per auxiliary port.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PortGraph {
    pub vertices: BTreeSet<PortId>,
    pub wire_edges: Vec<(PortId, PortId)>,
    /// (auxiliary port, principal port)
    pub cell_edges: Vec<(PortId, PortId)>,
}

pub fn build_graph(n: &Net) -> Result<PortGraph, PathsError> {
    if n.has_boxes() {
        return Err(PathsError::HasBoxes);
    }
    let mut g = PortGraph::default();
    for f in n.free_ports() {
        g.vertices.insert(f.port);
    }
    for c in n.cells() {
        g.vertices.extend(c.ports());
        for a in &c.aux {
            g.cell_edges.push((*a, c.principal));
        }
    }
    for w in n.wires() {
        g.vertices.insert(w.a);
        g.vertices.insert(w.b);
        g.wire_edges.push((w.a, w.b));
    }
    Ok(g)
}

/// Kind of the next edge a path may take from a port.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Next {
    Wire,
    Cell,
}

struct Walk {
    wire: HashMap<PortId, Vec<PortId>>,
    cell: HashMap<PortId, Vec<PortId>>,
}

impl Walk {
    fn new(g: &PortGraph) -> Walk {
        let mut wire: HashMap<PortId, Vec<PortId>> = HashMap::new();
        let mut cell: HashMap<PortId, Vec<PortId>> = HashMap::new();
        for (a, b) in &g.wire_edges {
            wire.entry(*a).or_default().push(*b);
            wire.entry(*b).or_default().push(*a);
        }
        for (a, p) in &g.cell_edges {
            cell.entry(*a).or_default().push(*p);
            cell.entry(*p).or_default().push(*a);
        }
        Walk { wire, cell }
    }

    fn step(&self, p: PortId, k: Next) -> (&[PortId], Next) {
        let (m, next) = match k {
            Next::Wire => (&self.wire, Next::Cell),
            Next::Cell => (&self.cell, Next::Wire),
        };
        (m.get(&p).map_or(&[][..], |v| v.as_slice()), next)
    }
}

fn graph_cyclic(g: &PortGraph) -> bool {
    let w = Walk::new(g);
    for &p in &g.vertices {
        let mut seen: HashSet<(PortId, Next)> = HashSet::new();
        let mut stack = vec![(p, Next::Wire), (p, Next::Cell)];
        while let Some((q, k)) = stack.pop() {
            let (succ, nk) = w.step(q, k);
            for &r in succ {
                if r == p {
                    return true;
                }
                if seen.insert((r, nk)) {
                    stack.push((r, nk));
                }
            }
        }
    }
    false
}

/// True iff no nonempty alternating path returns to its starting port.
pub fn check_acyclic(n: &Net) -> Result<bool, PathsError> {
    Ok(!graph_cyclic(&build_graph(n)?))
}

fn endpoints(n: &Net, i: PortId, o: PortId) -> Result<(), PathsError> {
    for p in [i, o] {
        if !n.is_free(p) {
            return Err(PathsError::NotFree(p));
        }
    }
    Ok(())
}

/// Number of alternating paths from free port `i` to free port `o`, by memoized recursion.
pub fn count_paths(n: &Net, i: PortId, o: PortId) -> Result<u64, PathsError> {
    let g = build_graph(n)?;
    endpoints(n, i, o)?;
    if graph_cyclic(&g) {
        return Err(PathsError::CyclicNet);
    }
    let w = Walk::new(&g);
    let mut memo: HashMap<(PortId, Next), u64> = HashMap::new();
    Ok(dp(&w, o, i, Next::Wire, &mut memo))
}

fn dp(w: &Walk, o: PortId, p: PortId, k: Next, memo: &mut HashMap<(PortId, Next), u64>) -> u64 {
    if let Some(v) = memo.get(&(p, k)) {
        return *v;
    }
    // arriving at o over a wire ends a path
    let mut total = u64::from(k == Next::Cell && p == o);
    let (succ, nk) = w.step(p, k);
    for &q in succ {
        total += dp(w, o, q, nk, memo);
    }
    memo.insert((p, k), total);
    total
}

/// Same count by explicit enumeration of every path; independent of [`count_paths`].
pub fn count_paths_dfs(n: &Net, i: PortId, o: PortId) -> Result<u64, PathsError> {
    let g = build_graph(n)?;
    endpoints(n, i, o)?;
    let w = Walk::new(&g);
    let mut count = 0u64;
    // each frame: port, next edge kind, ports on the current path
    let mut stack: Vec<(PortId, Next, Vec<PortId>)> = vec![(i, Next::Wire, vec![i])];
    while let Some((p, k, path)) = stack.pop() {
        if k == Next::Cell && p == o && path.len() > 1 {
            count += 1;
        }
        let (succ, nk) = w.step(p, k);
        for &q in succ {
            if path.contains(&q) {
                return Err(PathsError::CyclicNet);
            }
            let mut next = path.clone();
            next.push(q);
            stack.push((q, nk, next));
        }
    }
    Ok(count)
}

/// Box-free nets whose cells are only (co)contractions and (co)weakenings.
pub fn is_structural(n: &Net) -> bool {
    n.cells().all(|c| {
        matches!(
            c.symbol,
            Symbol::Contraction | Symbol::Cocontraction | Symbol::Weakening | Symbol::Coweakening
        )
    })
}
