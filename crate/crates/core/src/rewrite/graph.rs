//! Exhaustive one-step reduction graphs over sums.

use std::collections::HashMap;

use crate::proofnet::{absorb_neutral, Net, NetSum};

use super::{apply_raw, find_redexes, Policy};

/// Reachable sums and one-step edges; nodes are distinct up to equivalence.
#[derive(Clone, Debug, Default)]
pub struct ReductionGraph {
    pub nodes: Vec<NetSum>,
    pub edges: Vec<(usize, usize)>,
    /// Set when exploration stopped at the node budget.
    pub truncated: bool,
}

impl ReductionGraph {
    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |(a, _)| *a == v).map(|(_, b)| *b)
    }

    /// Nodes without outgoing edges.
    pub fn sinks(&self) -> Vec<usize> {
        let mut out = vec![true; self.nodes.len()];
        for (a, _) in &self.edges {
            out[*a] = false;
        }
        (0..self.nodes.len()).filter(|v| out[*v]).collect()
    }

    /// True if some node reaches itself (self loops included).
    pub fn has_cycle(&self) -> bool {
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for (a, b) in &self.edges {
            adj[*a].push(*b);
        }
        // 0 unvisited, 1 on stack, 2 done
        let mut state = vec![0u8; n];
        for s in 0..n {
            if state[s] != 0 {
                continue;
            }
            let mut stack = vec![(s, 0usize)];
            state[s] = 1;
            while let Some((v, i)) = stack.pop() {
                if i < adj[v].len() {
                    stack.push((v, i + 1));
                    let w = adj[v][i];
                    match state[w] {
                        1 => return true,
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                }
            }
        }
        false
    }
}

fn node_key(s: &NetSum) -> String {
    s.keys().join("\u{1}")
}

/// Explores every redex choice in every summand, breadth first, up to `max_nodes` nodes.
/// Nodes are stored with neutral (co)weakenings absorbed, as `normalize` keeps them.
pub fn reduction_graph(n: &Net, max_nodes: usize) -> ReductionGraph {
    let mut g = ReductionGraph::default();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut n = n.clone();
    absorb_neutral(&mut n);
    let start = NetSum::single(n);
    index.insert(node_key(&start), 0);
    g.nodes.push(start);
    let mut next = 0;
    while next < g.nodes.len() {
        let v = next;
        next += 1;
        let cur = g.nodes[v].clone();
        let mut succ = Vec::new();
        for (k, net) in cur.keyed() {
            for r in find_redexes(net, Policy::All) {
                let Ok(out) = apply_raw(net, &r) else { continue };
                let mut s = NetSum::zero();
                for (k2, m) in cur.keyed() {
                    if k2 != k {
                        s.push_keyed(k2.to_string(), m.clone());
                    }
                }
                for mut m in out {
                    absorb_neutral(&mut m);
                    s.push(m);
                }
                succ.push(s);
            }
        }
        for s in succ {
            let key = node_key(&s);
            let w = match index.get(&key) {
                Some(w) => *w,
                None => {
                    if g.nodes.len() >= max_nodes {
                        g.truncated = true;
                        continue;
                    }
                    let w = g.nodes.len();
                    index.insert(key, w);
                    g.nodes.push(s);
                    w
                }
            };
            if !g.edges.contains(&(v, w)) {
                g.edges.push((v, w));
            }
        }
    }
    g
}
