//! Canonical forms modulo the structural equivalence: associativity and
//! commutativity of (co)contraction trees, neutrality of (co)weakenings,
//! and port renaming.
//!
//! Trees are flattened to n-ary nodes with unordered leaves, then the
//! resulting coloured graph is labelled by colour refinement and
//! individualisation search with automorphism pruning.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{Cell, CellId, Fresh, Net, NetSum, PortId, Symbol};

/// Search leaves explored before settling on the best labelling found.
const LEAF_BUDGET: usize = 4096;

/// Removes (co)weakenings sitting on (co)contraction leaves, to fixpoint.
pub fn absorb_neutral(n: &mut Net) -> usize {
    let mut count = 0;
    loop {
        let hit = n.cells.values().find_map(|c| {
            let unit = match c.symbol {
                Symbol::Contraction => Symbol::Weakening,
                Symbol::Cocontraction => Symbol::Coweakening,
                _ => return None,
            };
            c.aux.iter().enumerate().find_map(|(k, a)| {
                let q = n.peer(*a)?;
                let (w, slot) = n.owner(q)?;
                (slot == 0 && w != c.id && n.cells[&w].symbol == unit).then_some((c.id, k, w))
            })
        });
        let Some((c, k, w)) = hit else { break };
        n.remove_cell(w);
        let cell = n.remove_cell(c).unwrap();
        n.disconnect(cell.aux[k]);
        let other = cell.aux[1 - k];
        n.fuse(cell.principal, other);
        count += 1;
    }
    count
}

/// What a vertex of the labelling graph stands for.
#[derive(Clone, Copy, Debug)]
enum Vx {
    Cell(CellId),
    /// Flattened (co)contraction tree, named by its root cell.
    Tree(CellId),
    Free,
}

struct Graph {
    what: Vec<Vx>,
    base: Vec<String>,
    adj: Vec<Vec<(String, usize)>>,
}

/// Vertex of the labelling graph a port hangs from, with its slot tag.
type Attach = (usize, String);

/// Result of labelling one net.
pub(crate) struct Labelling {
    pub key: String,
    /// The labelled net, neutral (co)weakenings absorbed.
    net: Net,
    what: Vec<Vx>,
    /// Canonical position of every vertex.
    pos: Vec<usize>,
    attach: HashMap<PortId, Attach>,
    trees: BTreeMap<CellId, (Symbol, Vec<PortId>)>,
    /// Orbit class of each door, for box bodies.
    pub door_class: Vec<usize>,
    box_keys: HashMap<CellId, Labelling>,
}

fn tree_decomposition(n: &Net) -> (BTreeMap<CellId, (Symbol, Vec<PortId>)>, HashMap<CellId, CellId>) {
    // parent of a (co)contraction: the same-symbol cell whose aux port is wired to its principal
    let mut parent: HashMap<CellId, CellId> = HashMap::new();
    for c in n.cells.values() {
        if !matches!(c.symbol, Symbol::Contraction | Symbol::Cocontraction) {
            continue;
        }
        if let Some(q) = n.peer(c.principal) {
            if let Some((pc, slot)) = n.owner(q) {
                if slot > 0 && n.cells[&pc].symbol == c.symbol {
                    parent.insert(c.id, pc);
                }
            }
        }
    }
    // break cycles: the minimal id on a parent cycle becomes a root
    let ids: Vec<CellId> = parent.keys().copied().collect::<BTreeSet<_>>().into_iter().collect();
    for start in ids {
        let mut seen = vec![start];
        let mut cur = start;
        while let Some(&p) = parent.get(&cur) {
            if let Some(pos) = seen.iter().position(|x| *x == p) {
                let root = *seen[pos..].iter().min().unwrap();
                parent.remove(&root);
                break;
            }
            seen.push(p);
            cur = p;
        }
    }
    let root_of = |mut c: CellId| {
        while let Some(&p) = parent.get(&c) {
            c = p;
        }
        c
    };
    let mut trees: BTreeMap<CellId, (Symbol, Vec<PortId>)> = BTreeMap::new();
    let mut member: HashMap<CellId, CellId> = HashMap::new();
    for c in n.cells.values() {
        if !matches!(c.symbol, Symbol::Contraction | Symbol::Cocontraction) {
            continue;
        }
        let r = root_of(c.id);
        member.insert(c.id, r);
        trees.entry(r).or_insert((c.symbol, Vec::new()));
    }
    for c in n.cells.values() {
        let Some(&r) = member.get(&c.id) else { continue };
        for a in &c.aux {
            let child = n
                .peer(*a)
                .and_then(|q| n.owner(q))
                .filter(|(cc, slot)| *slot == 0 && parent.get(cc) == Some(&c.id))
                .is_some();
            if !child {
                trees.get_mut(&r).unwrap().1.push(*a);
            }
        }
    }
    (trees, member)
}

fn build_graph(
    n: &Net,
    inner: bool,
    trees: &BTreeMap<CellId, (Symbol, Vec<PortId>)>,
    member: &HashMap<CellId, CellId>,
    box_keys: &HashMap<CellId, Labelling>,
) -> (Graph, HashMap<PortId, Attach>) {
    let mut g = Graph {
        what: Vec::new(),
        base: Vec::new(),
        adj: Vec::new(),
    };
    let mut attach: HashMap<PortId, Attach> = HashMap::new();
    let add = |g: &mut Graph, w: Vx, base: String| {
        g.what.push(w);
        g.base.push(base);
        g.adj.push(Vec::new());
        g.what.len() - 1
    };
    for (k, f) in n.free.iter().enumerate() {
        let base = if !inner {
            format!("free:{}", f.label)
        } else if k == 0 {
            "free:p".to_string()
        } else {
            "free*".to_string()
        };
        let v = add(&mut g, Vx::Free, base);
        attach.insert(f.port, (v, "f".into()));
    }
    for c in n.cells.values() {
        if member.contains_key(&c.id) {
            continue;
        }
        let base = match c.symbol {
            Symbol::Box => format!("box:{}", box_keys[&c.id].key),
            s => s.name().to_string(),
        };
        let v = add(&mut g, Vx::Cell(c.id), base);
        for (slot, p) in c.ports().enumerate() {
            let tag = if slot == 0 {
                "p".to_string()
            } else if c.symbol == Symbol::Box {
                format!("d{}", box_keys[&c.id].door_class[slot - 1])
            } else {
                format!("a{slot}")
            };
            attach.insert(p, (v, tag));
        }
    }
    for (root, (sym, leaves)) in trees {
        let base = if *sym == Symbol::Contraction { "C" } else { "K" };
        let v = add(&mut g, Vx::Tree(*root), base.into());
        attach.insert(n.cells[root].principal, (v, "p".into()));
        for l in leaves {
            attach.insert(*l, (v, "l".into()));
        }
    }
    for w in n.wires() {
        let (Some((u, tu)), Some((v, tv))) = (attach.get(&w.a), attach.get(&w.b)) else {
            continue;
        };
        let back = w.ty.dual();
        g.adj[*u].push((format!("{tu}|{}|{tv}", w.ty), *v));
        g.adj[*v].push((format!("{tv}|{back}|{tu}"), *u));
    }
    (g, attach)
}

/// Interned, integer form of the graph.
struct IGraph {
    base: Vec<u32>,
    adj: Vec<Vec<(u32, u32)>>,
    base_names: Vec<String>,
    edge_names: Vec<String>,
}

fn intern(g: &Graph) -> IGraph {
    let base_names: Vec<String> = g.base.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let edge_names: Vec<String> = g
        .adj
        .iter()
        .flatten()
        .map(|(e, _)| e.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let bi: HashMap<&str, u32> = base_names.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect();
    let ei: HashMap<&str, u32> = edge_names.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect();
    IGraph {
        base: g.base.iter().map(|s| bi[s.as_str()]).collect(),
        adj: g
            .adj
            .iter()
            .map(|es| es.iter().map(|(e, w)| (ei[e.as_str()], *w as u32)).collect())
            .collect(),
        base_names,
        edge_names,
    }
}

fn classes(colors: &[u32]) -> usize {
    colors.iter().copied().collect::<BTreeSet<_>>().len()
}

/// Colour refinement to a stable partition; colours become dense ranks.
fn refine(g: &IGraph, colors: &mut Vec<u32>) {
    let mut k = classes(colors);
    loop {
        let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..colors.len())
            .map(|v| {
                let mut nb: Vec<(u32, u32)> = g.adj[v].iter().map(|(e, w)| (*e, colors[*w as usize])).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut uniq: Vec<&(u32, Vec<(u32, u32)>)> = sigs.iter().collect();
        uniq.sort();
        uniq.dedup();
        let rank: HashMap<&(u32, Vec<(u32, u32)>), u32> =
            uniq.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
        let next: Vec<u32> = sigs.iter().map(|s| rank[s]).collect();
        let k2 = uniq.len();
        *colors = next;
        if k2 == k {
            break;
        }
        k = k2;
    }
}

type Leaf = (Vec<u32>, Vec<(u32, u32, u32)>);

struct Search<'a> {
    g: &'a IGraph,
    best: Option<(Leaf, Vec<u32>)>,
    /// First leaf reached, with its colouring and individualisation path.
    first: Option<(Leaf, Vec<u32>, Vec<usize>)>,
    autos: Vec<Vec<u32>>,
    leaves: usize,
}

impl Search<'_> {
    fn leaf(&self, colors: &[u32]) -> Leaf {
        let n = colors.len();
        let mut labels = vec![0u32; n];
        for v in 0..n {
            labels[colors[v] as usize] = self.g.base[v];
        }
        let mut edges: Vec<(u32, u32, u32)> = Vec::new();
        for v in 0..n {
            for (e, w) in &self.g.adj[v] {
                edges.push((colors[v], colors[*w as usize], *e));
            }
        }
        edges.sort_unstable();
        (labels, edges)
    }

    fn same_orbit(&self, prefix: &[usize], u: usize, v: usize) -> bool {
        let n = self.g.base.len();
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            let mut y = x;
            while uf[y] != r {
                let nx = uf[y];
                uf[y] = r;
                y = nx;
            }
            r
        }
        for a in &self.autos {
            if prefix.iter().any(|p| a[*p] as usize != *p) {
                continue;
            }
            for x in 0..n {
                let (rx, ry) = (find(&mut uf, x), find(&mut uf, a[x] as usize));
                if rx != ry {
                    uf[rx] = ry;
                }
            }
        }
        find(&mut uf, u) == find(&mut uf, v)
    }

    /// Automorphism taking the leaf coloured `from` to the leaf coloured `to`.
    fn automorphism(from: &[u32], to: &[u32]) -> Vec<u32> {
        // colors[v] = position; invert `from` to map positions back to vertices
        let n = from.len();
        let mut inv = vec![0u32; n];
        for v in 0..n {
            inv[from[v] as usize] = v as u32;
        }
        (0..n).map(|v| inv[to[v] as usize]).collect()
    }

    /// Explores the subtree below `prefix`. Returns the depth to jump back to
    /// when the subtree was found equivalent to one already explored.
    fn run(&mut self, mut colors: Vec<u32>, prefix: &mut Vec<usize>) -> Option<usize> {
        if self.leaves >= LEAF_BUDGET {
            return Some(0);
        }
        refine(self.g, &mut colors);
        let n = colors.len();
        if classes(&colors) == n {
            self.leaves += 1;
            let l = self.leaf(&colors);
            let Some((fl, fc, fp)) = &self.first else {
                self.first = Some((l.clone(), colors.clone(), prefix.clone()));
                self.best = Some((l, colors));
                return None;
            };
            if l == *fl {
                self.autos.push(Self::automorphism(fc, &colors));
                let common = fp.iter().zip(prefix.iter()).take_while(|(a, b)| a == b).count();
                return Some(common);
            }
            let (b, bc) = self.best.as_ref().unwrap();
            if l < *b {
                self.best = Some((l, colors));
            } else if l == *b {
                let a = Self::automorphism(bc, &colors);
                self.autos.push(a);
            }
            return None;
        }
        let mut count: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, c) in colors.iter().enumerate() {
            count.entry(*c).or_default().push(v);
        }
        let (&target, members) = count.iter().find(|(_, m)| m.len() > 1).unwrap();
        let members = members.clone();
        let mut explored: Vec<usize> = Vec::new();
        for v in members {
            if explored.iter().any(|u| self.same_orbit(prefix, *u, v)) {
                continue;
            }
            let ind: Vec<u32> = colors
                .iter()
                .enumerate()
                .map(|(u, c)| 2 * c + u32::from(*c == target && u != v))
                .collect();
            let depth = prefix.len();
            prefix.push(v);
            let jump = self.run(ind, prefix);
            prefix.pop();
            explored.push(v);
            if let Some(d) = jump {
                if d < depth {
                    return Some(d);
                }
            }
        }
        None
    }
}

fn render_key(g: &IGraph, leaf: &Leaf) -> String {
    let mut s = String::new();
    for l in &leaf.0 {
        let name = &g.base_names[*l as usize];
        s.push_str(&format!("{}:{};", name.len(), name));
    }
    s.push('|');
    for (a, b, e) in &leaf.1 {
        let name = &g.edge_names[*e as usize];
        s.push_str(&format!("{a}-{b}:{}:{};", name.len(), name));
    }
    s
}

/// Labels a net. `inner` marks a box body: first free port is the principal, the rest are unordered doors.
pub(crate) fn label(net: &Net, inner: bool) -> Labelling {
    let mut n = net.clone();
    absorb_neutral(&mut n);
    let mut box_keys = HashMap::new();
    for c in n.cells.values() {
        if let Some(b) = &c.inner {
            box_keys.insert(c.id, label(b, true));
        }
    }
    let (trees, member) = tree_decomposition(&n);
    let (g, attach) = build_graph(&n, inner, &trees, &member, &box_keys);
    let ig = intern(&g);
    let mut s = Search {
        g: &ig,
        best: None,
        first: None,
        autos: Vec::new(),
        leaves: 0,
    };
    s.run(ig.base.clone(), &mut Vec::new());
    let (leaf, colors) = s.best.take().unwrap_or_default();
    let key = render_key(&ig, &leaf);
    // orbits of the automorphism group found
    let nv = colors.len();
    let mut orbit: Vec<usize> = (0..nv).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for a in &s.autos {
            for x in 0..nv {
                let y = a[x] as usize;
                let m = orbit[x].min(orbit[y]);
                if orbit[x] != m || orbit[y] != m {
                    orbit[x] = m;
                    orbit[y] = m;
                    changed = true;
                }
            }
        }
    }
    let mut door_class = Vec::new();
    if inner {
        // class = rank of the orbit's least canonical position
        let rep = |v: usize| {
            (0..nv)
                .filter(|u| orbit[*u] == orbit[v])
                .map(|u| colors[u])
                .min()
                .unwrap()
        };
        let reps: Vec<u32> = n.free.iter().skip(1).map(|f| rep(attach[&f.port].0)).collect();
        let sorted: Vec<u32> = reps.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        door_class = reps
            .iter()
            .map(|r| sorted.iter().position(|x| x == r).unwrap())
            .collect();
    }
    Labelling {
        key,
        net: n,
        what: g.what,
        pos: colors.iter().map(|c| *c as usize).collect(),
        attach,
        trees,
        door_class,
        box_keys,
    }
}

/// Key identifying a net's equivalence class.
pub fn canonical_key(n: &Net) -> String {
    label(n, false).key
}

pub fn canonical_equal_nets(a: &Net, b: &Net) -> bool {
    canonical_key(a) == canonical_key(b)
}

/// Equality of sums modulo the equivalence and set semantics.
pub fn canonical_equal(a: &NetSum, b: &NetSum) -> bool {
    a.keys() == b.keys()
}

/// Chosen representative: trees rebuilt as left combs, ids renumbered in canonical order.
pub fn canonicalize(net: &Net) -> Net {
    let lab = label(net, false);
    let mut free: Vec<(String, usize, PortId)> = lab
        .net
        .free
        .iter()
        .map(|f| (f.label.clone(), lab.pos[lab.attach[&f.port].0], f.port))
        .collect();
    free.sort();
    let order: Vec<PortId> = free.iter().map(|x| x.2).collect();
    rebuild(&lab, &order, &mut Fresh::new())
}

/// Rebuilds the labelled net with ids drawn in canonical order; `free_order` fixes the free list.
fn rebuild(lab: &Labelling, free_order: &[PortId], fresh: &mut Fresh) -> Net {
    let n = &lab.net;
    let mut out = Net::new();
    // fresh ports waiting for a wire, per vertex and slot tag
    let mut pool: HashMap<(usize, String), VecDeque<PortId>> = HashMap::new();
    let mut put = |v: usize, tag: String, p: PortId| pool.entry((v, tag)).or_default().push_back(p);
    for p in free_order {
        let np = fresh.next();
        out.push_free(np, n.label_of(*p).unwrap().to_string());
        put(lab.attach[p].0, "f".into(), np);
    }
    let mut order: Vec<usize> = (0..lab.what.len()).collect();
    order.sort_by_key(|v| lab.pos[*v]);
    for v in order {
        match lab.what[v] {
            Vx::Free => {}
            Vx::Tree(root) => {
                let (sym, leaves) = &lab.trees[&root];
                let ty = n.ty_out(n.cells[&root].principal).unwrap().clone();
                let k = leaves.len();
                let mut top = fresh.next();
                put(v, "p".into(), top);
                let mut slots = vec![0; k];
                // left comb: each cell's second input is the last remaining leaf
                for i in (1..k).rev() {
                    let id = fresh.next();
                    let a1 = fresh.next();
                    let a2 = fresh.next();
                    out.insert_cell(Cell {
                        id,
                        symbol: *sym,
                        principal: top,
                        aux: vec![a1, a2],
                        inner: None,
                    });
                    slots[i] = a2;
                    if i > 1 {
                        let child = fresh.next();
                        out.connect(child, a1, ty.clone());
                        top = child;
                    } else {
                        slots[0] = a1;
                    }
                }
                for s in slots {
                    put(v, "l".into(), s);
                }
            }
            Vx::Cell(cid) => {
                let c = &n.cells[&cid];
                let id = fresh.next();
                let principal = fresh.next();
                put(v, "p".into(), principal);
                let (aux, inner) = if let Some(bl) = lab.box_keys.get(&cid) {
                    let b = &bl.net;
                    let mut doors: Vec<usize> = (0..c.aux.len()).collect();
                    doors.sort_by_key(|k| (bl.door_class[*k], bl.pos[bl.attach[&b.free[k + 1].port].0]));
                    let mut inner_order = vec![b.free[0].port];
                    inner_order.extend(doors.iter().map(|k| b.free[k + 1].port));
                    let rebuilt = rebuild(bl, &inner_order, fresh);
                    let aux: Vec<PortId> = doors
                        .iter()
                        .map(|k| {
                            let np = fresh.next();
                            put(v, format!("d{}", bl.door_class[*k]), np);
                            np
                        })
                        .collect();
                    (aux, Some(Box::new(relabel_inner(keep_contents(rebuilt, fresh)))))
                } else {
                    let aux: Vec<PortId> = (1..=c.aux.len())
                        .map(|slot| {
                            let np = fresh.next();
                            put(v, format!("a{slot}"), np);
                            np
                        })
                        .collect();
                    (aux, None)
                };
                out.insert_cell(Cell {
                    id,
                    symbol: c.symbol,
                    principal,
                    aux,
                    inner,
                });
            }
        }
    }
    // wires in canonical order, each taking the next free slot at both ends
    let mut wires: Vec<(usize, String, usize, String, String, super::Formula)> = Vec::new();
    for w in n.wires() {
        let (Some((u, tu)), Some((v, tv))) = (lab.attach.get(&w.a), lab.attach.get(&w.b)) else {
            continue;
        };
        let (pu, pv) = (lab.pos[*u], lab.pos[*v]);
        if (pu, tu) <= (pv, tv) {
            wires.push((pu, tu.clone(), pv, tv.clone(), w.ty.to_string(), w.ty.clone()));
        } else {
            let d = w.ty.dual();
            wires.push((pv, tv.clone(), pu, tu.clone(), d.to_string(), d));
        }
    }
    wires.sort_by(|a, b| (a.0, &a.1, a.2, &a.3, &a.4).cmp(&(b.0, &b.1, b.2, &b.3, &b.4)));
    let by_pos: HashMap<usize, usize> = (0..lab.pos.len()).map(|v| (lab.pos[v], v)).collect();
    for (pu, tu, pv, tv, _, ty) in wires {
        let a = pool.get_mut(&(by_pos[&pu], tu)).and_then(|q| q.pop_front()).expect("slot");
        let b = pool.get_mut(&(by_pos[&pv], tv)).and_then(|q| q.pop_front()).expect("slot");
        out.connect(a, b, ty);
    }
    out
}

/// Box contents reduced to a wire from the principal to a door are not a net;
/// the wire becomes a contraction with a weakening leaf, which is equivalent.
fn keep_contents(mut n: Net, fresh: &mut Fresh) -> Net {
    let p = n.free[0].port;
    let Some(d) = n.peer(p).filter(|d| n.is_free(*d)) else {
        return n;
    };
    let why = n.free_type(d).unwrap().clone();
    n.disconnect(p);
    let (c, pc, a1, a2) = (fresh.next(), fresh.next(), fresh.next(), fresh.next());
    n.insert_cell(Cell { id: c, symbol: Symbol::Contraction, principal: pc, aux: vec![a1, a2], inner: None });
    let (w, pw) = (fresh.next(), fresh.next());
    n.insert_cell(Cell { id: w, symbol: Symbol::Weakening, principal: pw, aux: Vec::new(), inner: None });
    n.connect(pc, d, why.clone());
    n.connect(a1, p, why.dual());
    n.connect(pw, a2, why);
    n
}

fn relabel_inner(mut n: Net) -> Net {
    for (k, f) in n.free.iter_mut().enumerate() {
        f.label = if k == 0 { "p".into() } else { format!("d{k}") };
    }
    n
}
