//! Routing areas: nets of (co)contractions and (co)weakenings realising multirelations.

use std::collections::{BTreeMap, HashSet};

use crate::multirel::{LabelSet, MultirelError, Multirelation};
use crate::paths::{check_acyclic, count_paths, is_structural, PathsError};
use crate::proofnet::{validate, CellId, Formula, Fresh, Net, NetSum, PortId, Symbol};
use crate::rewrite::{find_redexes, normalize, Policy, RewriteError};

pub const INPUT_PREFIX: &str = "in:";
pub const OUTPUT_PREFIX: &str = "out:";

#[derive(Debug, thiserror::Error)]
pub enum RoutingError {
    #[error("not a routing net: {0}")]
    NotRoutingNet(String),
    #[error("net is not normal")]
    NotNormal,
    #[error("normal net is not area shaped: {0}")]
    NotAreaShaped(String),
    #[error("input {input} already reaches output {output}")]
    CycleRisk { input: String, output: String },
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Multirel(#[from] MultirelError),
    #[error(transparent)]
    Paths(#[from] PathsError),
}

/// A multirelation from inputs to outputs, routed on wires of type `payload` (a `!A`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutingArea {
    pub rel: Multirelation,
    pub payload: Formula,
}

impl RoutingArea {
    /// Area carrying `!1`.
    pub fn new(rel: Multirelation) -> RoutingArea {
        RoutingArea {
            rel,
            payload: Formula::bang(Formula::One),
        }
    }
}

pub fn input_label(l: &str) -> String {
    format!("{INPUT_PREFIX}{l}")
}

pub fn output_label(l: &str) -> String {
    format!("{OUTPUT_PREFIX}{l}")
}

/// Area label of a free port label, without its `in:`/`out:` prefix.
pub fn strip_label(l: &str) -> &str {
    l.strip_prefix(INPUT_PREFIX)
        .or_else(|| l.strip_prefix(OUTPUT_PREFIX))
        .unwrap_or(l)
}

/// Free ports that send a `!A` into the net.
pub fn inputs(n: &Net) -> Vec<(PortId, String)> {
    n.free_ports()
        .iter()
        .filter(|f| n.ty_out(f.port).is_some_and(|t| t.unbang().is_some()))
        .map(|f| (f.port, f.label.clone()))
        .collect()
}

/// Free ports that receive a `!A` from the net.
pub fn outputs(n: &Net) -> Vec<(PortId, String)> {
    n.free_ports()
        .iter()
        .filter(|f| n.ty_in(f.port).is_some_and(|t| t.unbang().is_some()))
        .map(|f| (f.port, f.label.clone()))
        .collect()
}

/// Builds a left comb of `k ≥ 2` binary cells below `root`; returns the leaf ports in order.
/// `down` is true when `!A` flows from the root toward the leaves.
fn comb(n: &mut Net, fresh: &mut Fresh, sym: Symbol, root: PortId, k: usize, down: bool, ty: &Formula) -> Vec<PortId> {
    let flow = |n: &mut Net, from: PortId, to: PortId| {
        if down {
            n.connect(from, to, ty.clone())
        } else {
            n.connect(to, from, ty.clone())
        }
    };
    let mut leaves = Vec::with_capacity(k);
    let mut attach = root;
    for depth in 0..k - 1 {
        let id = n.add_cell(fresh, sym, 2, None);
        let c = n.cell(id).unwrap().clone();
        flow(n, attach, c.principal);
        leaves.push(c.aux[1]);
        if depth == k - 2 {
            leaves.push(c.aux[0]);
        }
        attach = c.aux[0];
    }
    leaves.reverse();
    leaves
}

/// Ports standing for the `k` wires of one label: a unit cell, the free port itself, or comb leaves.
fn endpoints(n: &mut Net, fresh: &mut Fresh, free: PortId, k: usize, input: bool, ty: &Formula) -> Vec<PortId> {
    match k {
        0 => {
            let (sym, flip) = if input {
                (Symbol::Weakening, true)
            } else {
                (Symbol::Coweakening, false)
            };
            let id = n.add_cell(fresh, sym, 0, None);
            let p = n.cell(id).unwrap().principal;
            if flip {
                n.connect(free, p, ty.clone());
            } else {
                n.connect(p, free, ty.clone());
            }
            Vec::new()
        }
        1 => vec![free],
        _ => {
            let sym = if input {
                Symbol::Contraction
            } else {
                Symbol::Cocontraction
            };
            comb(n, fresh, sym, free, k, input, ty)
        }
    }
}

/// Canonical net of an area: one tree per label, `R(i,o)` wires between the trees of `i` and `o`.
pub fn build_area(a: &RoutingArea) -> Net {
    let mut fresh = Fresh::new();
    let mut n = Net::new();
    let ins = a.rel.domain().sorted();
    let outs = a.rel.codomain().sorted();
    let in_ports: Vec<PortId> = ins.iter().map(|l| n.add_free(&mut fresh, input_label(l))).collect();
    let out_ports: Vec<PortId> = outs.iter().map(|l| n.add_free(&mut fresh, output_label(l))).collect();
    let ty = &a.payload;
    let mut in_ends: Vec<std::vec::IntoIter<PortId>> = Vec::new();
    for (k, i) in ins.iter().enumerate() {
        let ar: u64 = outs.iter().map(|o| a.rel.get(i, o)).sum();
        in_ends.push(endpoints(&mut n, &mut fresh, in_ports[k], ar as usize, true, ty).into_iter());
    }
    let mut out_ends: Vec<std::vec::IntoIter<PortId>> = Vec::new();
    for (k, o) in outs.iter().enumerate() {
        let ar: u64 = ins.iter().map(|i| a.rel.get(i, o)).sum();
        out_ends.push(endpoints(&mut n, &mut fresh, out_ports[k], ar as usize, false, ty).into_iter());
    }
    for (x, i) in ins.iter().enumerate() {
        for (y, o) in outs.iter().enumerate() {
            for _ in 0..a.rel.get(i, o) {
                let p = in_ends[x].next().unwrap();
                let q = out_ends[y].next().unwrap();
                n.connect(p, q, ty.clone());
            }
        }
    }
    n
}

/// The routed formula `!A` of a wire, whichever way it is read.
fn bang_of(t: &Formula) -> Option<Formula> {
    if t.unbang().is_some() {
        Some(t.clone())
    } else if t.unwhynot().is_some() {
        Some(t.dual())
    } else {
        None
    }
}

fn check_routing(n: &Net) -> Result<Formula, String> {
    if n.has_boxes() {
        return Err("contains boxes".into());
    }
    if !is_structural(n) {
        return Err("contains non-structural cells".into());
    }
    let v = validate(n);
    if let Some(v) = v.first() {
        return Err(format!("invalid: {v}"));
    }
    let mut payload: Option<Formula> = None;
    for w in n.wires() {
        let Some(b) = bang_of(&w.ty) else {
            return Err(format!("wire {}-{} carries {}", w.a, w.b, w.ty));
        };
        match &payload {
            Some(p) if *p != b => return Err(format!("mixed wire formulas {p} and {b}")),
            Some(_) => {}
            None => payload = Some(b),
        }
    }
    if !check_acyclic(n).map_err(|e| e.to_string())? {
        return Err("cyclic".into());
    }
    Ok(payload.unwrap_or_else(|| Formula::bang(Formula::One)))
}

/// Box-free, structural cells only, one `!A` on every wire, and acyclic.
pub fn is_routing_net(n: &Net) -> bool {
    check_routing(n).is_ok()
}

fn require_routing(n: &Net) -> Result<Formula, RoutingError> {
    check_routing(n).map_err(RoutingError::NotRoutingNet)
}

fn label_set(ports: &[(PortId, String)]) -> Result<LabelSet, MultirelError> {
    LabelSet::new(ports.iter().map(|(_, l)| strip_label(l).to_string()))
}

/// Reads the multirelation off a normal routing net.
pub fn read_area(n: &Net) -> Result<RoutingArea, RoutingError> {
    let payload = require_routing(n)?;
    if !find_redexes(n, Policy::All).is_empty() {
        return Err(RoutingError::NotNormal);
    }
    let ins = inputs(n);
    let outs = outputs(n);
    let mut rel = Multirelation::zero(label_set(&ins)?, label_set(&outs)?);
    let out_name: BTreeMap<PortId, &str> = outs.iter().map(|(p, l)| (*p, strip_label(l))).collect();
    let mut used: HashSet<CellId> = HashSet::new();
    let shape = |m: String| RoutingError::NotAreaShaped(m);
    for (ip, il) in &ins {
        let il = strip_label(il);
        // leaves of the input's contraction tree
        let mut stack = vec![n.peer(*ip).unwrap()];
        while let Some(p) = stack.pop() {
            if let Some(o) = out_name.get(&p) {
                rel.set(il, o, rel.get(il, o) + 1)?;
                continue;
            }
            let (c, slot) = n.owner(p).ok_or_else(|| shape(format!("dangling port {p}")))?;
            let cell = n.cell(c).unwrap();
            match (cell.symbol, slot) {
                (Symbol::Weakening, 0) => {
                    used.insert(c);
                }
                (Symbol::Contraction, 0) => {
                    used.insert(c);
                    stack.extend(cell.aux.iter().map(|a| n.peer(*a).unwrap()));
                }
                (Symbol::Cocontraction, k) if k > 0 => {
                    // climb the output's cocontraction tree to its root
                    let mut cur = c;
                    loop {
                        used.insert(cur);
                        let q = n.peer(n.cell(cur).unwrap().principal).unwrap();
                        if let Some(o) = out_name.get(&q) {
                            rel.set(il, o, rel.get(il, o) + 1)?;
                            break;
                        }
                        match n.owner(q) {
                            Some((up, s)) if s > 0 && n.cell(up).unwrap().symbol == Symbol::Cocontraction => cur = up,
                            _ => return Err(shape(format!("cocontraction {cur} does not reach an output"))),
                        }
                    }
                }
                (s, k) => return Err(shape(format!("input tree meets {s} at slot {k}"))),
            }
        }
    }
    for (op, _) in &outs {
        if let Some((c, 0)) = n.peer(*op).and_then(|q| n.owner(q)) {
            if n.cell(c).unwrap().symbol == Symbol::Coweakening {
                used.insert(c);
            }
        }
    }
    if let Some(c) = n.cells().find(|c| !used.contains(&c.id)) {
        return Err(shape(format!("cell {} outside every tree", c.id)));
    }
    Ok(RoutingArea { rel, payload })
}

fn single(s: NetSum) -> Result<Net, RoutingError> {
    if s.len() != 1 {
        return Err(RoutingError::NotAreaShaped(format!("normal form has {} summands", s.len())));
    }
    Ok(s.into_nets().pop().unwrap())
}

fn normal_net(n: &Net, budget: usize) -> Result<Net, RoutingError> {
    single(normalize(&NetSum::single(n.clone()), budget)?)
}

/// Multirelation of the normal form.
pub fn semantics(n: &Net, budget: usize) -> Result<Multirelation, RoutingError> {
    require_routing(n)?;
    Ok(read_area(&normal_net(n, budget)?)?.rel)
}

/// Multirelation counting alternating paths between free inputs and outputs.
pub fn path_semantics(n: &Net) -> Result<Multirelation, RoutingError> {
    require_routing(n)?;
    let ins = inputs(n);
    let outs = outputs(n);
    let mut rel = Multirelation::zero(label_set(&ins)?, label_set(&outs)?);
    for (ip, il) in &ins {
        for (op, ol) in &outs {
            rel.set(strip_label(il), strip_label(ol), count_paths(n, *ip, *op)?)?;
        }
    }
    Ok(rel)
}

fn tag(label: &str, side: &str) -> String {
    for pre in [INPUT_PREFIX, OUTPUT_PREFIX] {
        if let Some(rest) = label.strip_prefix(pre) {
            return format!("{pre}{side}{rest}");
        }
    }
    format!("{side}{label}")
}

/// Disjoint union; area labels of `a` get `L.`, those of `b` get `R.`.
pub fn juxtapose(a: &Net, b: &Net) -> Net {
    let mut out = a.clone();
    let mut fresh = Fresh::above(a);
    let (bb, _) = b.deep_copy(&mut fresh);
    for f in out.free_ports().to_vec() {
        out.relabel_free(f.port, tag(&f.label, "L."));
    }
    let mut bb = bb;
    for f in bb.free_ports().to_vec() {
        bb.relabel_free(f.port, tag(&f.label, "R."));
    }
    out.absorb(bb);
    out
}

fn find_port(ports: &[(PortId, String)], l: &str) -> Result<PortId, RoutingError> {
    ports
        .iter()
        .find(|(_, x)| strip_label(x) == l)
        .map(|(p, _)| *p)
        .ok_or_else(|| RoutingError::UnknownLabel(l.to_string()))
}

/// Feeds output `o` back into input `i` and normalizes.
pub fn trace_net(a: &Net, i: &str, o: &str, budget: usize) -> Result<Net, RoutingError> {
    require_routing(a)?;
    let ip = find_port(&inputs(a), i)?;
    let op = find_port(&outputs(a), o)?;
    if count_paths(a, ip, op)? > 0 {
        return Err(RoutingError::CycleRisk {
            input: i.into(),
            output: o.into(),
        });
    }
    let mut n = a.clone();
    n.remove_free(ip);
    n.remove_free(op);
    n.fuse(op, ip);
    normal_net(&n, budget)
}

/// Juxtaposes `a` and `b`, then traces each `outs[k]` of `a` into `ins[k]` of `b`.
/// Remaining labels keep their `L.`/`R.` tags.
pub fn compose_areas(a: &Net, outs: &[&str], b: &Net, ins: &[&str], budget: usize) -> Result<Net, RoutingError> {
    if outs.len() != ins.len() {
        return Err(RoutingError::UnknownLabel(format!(
            "{} outputs against {} inputs",
            outs.len(),
            ins.len()
        )));
    }
    let mut n = juxtapose(a, b);
    if outs.is_empty() {
        return normal_net(&n, budget);
    }
    for (o, i) in outs.iter().zip(ins) {
        n = trace_net(&n, &format!("R.{i}"), &format!("L.{o}"), budget)?;
    }
    Ok(n)
}

/// Copies delivered per output and the area left behind.
#[derive(Clone, Debug)]
pub struct Transit {
    pub counts: BTreeMap<String, u64>,
    /// The normal form with every delivered copy replaced by a coweakening.
    pub residual: Net,
}

/// Sends a closed box into input `i` through a fresh cocontraction that keeps `i` open.
pub fn transit(a: &Net, i: &str, payload: &Net, budget: usize) -> Result<Transit, RoutingError> {
    require_routing(a)?;
    let ip = find_port(&inputs(a), i)?;
    let label = a.label_of(ip).unwrap().to_string();
    let ty = a.ty_out(ip).unwrap().clone();
    let mut n = a.clone();
    let mut fresh = Fresh::above(&n);
    fresh.bump_above(payload);
    let (pl, _) = payload.deep_copy(&mut fresh);
    let box_port = pl.free_ports().first().map(|f| f.port).ok_or_else(|| {
        RoutingError::NotRoutingNet("payload has no free port".into())
    })?;
    n.absorb(pl);
    n.remove_free(box_port);
    n.remove_free(ip);
    let k = n.add_cell(&mut fresh, Symbol::Cocontraction, 2, None);
    let k = n.cell(k).unwrap().clone();
    // the cocontraction takes over the input's wire
    let inner_end = n.peer(ip).unwrap();
    n.disconnect(ip);
    n.connect(k.principal, inner_end, ty.clone());
    let box_end = n.peer(box_port).unwrap();
    n.disconnect(box_port);
    n.connect(box_end, k.aux[0], ty.clone());
    let fresh_in = n.add_free(&mut fresh, label);
    n.connect(fresh_in, k.aux[1], ty);
    let mut nf = normal_net(&n, budget)?;
    fresh.bump_above(&nf);
    let outs = outputs(&nf);
    let mut counts = BTreeMap::new();
    for (op, ol) in &outs {
        let mut count = 0;
        let mut stack = vec![nf.peer(*op).unwrap()];
        let mut boxes = Vec::new();
        while let Some(p) = stack.pop() {
            let Some((c, 0)) = nf.owner(p) else { continue };
            let cell = nf.cell(c).unwrap();
            match cell.symbol {
                Symbol::Box => {
                    count += 1;
                    boxes.push(c);
                }
                Symbol::Cocontraction => stack.extend(cell.aux.iter().map(|a| nf.peer(*a).unwrap())),
                _ => {}
            }
        }
        for c in boxes {
            let b = nf.remove_cell(c).unwrap();
            let w = nf.add_cell(&mut fresh, Symbol::Coweakening, 0, None);
            let wp = nf.cell(w).unwrap().principal;
            nf.move_wire(b.principal, wp);
        }
        counts.insert(strip_label(ol).to_string(), count);
    }
    crate::proofnet::absorb_neutral(&mut nf);
    Ok(Transit { counts, residual: nf })
}

/// Net of a closed box around a one cell: the `!1` payload.
pub fn unit_payload() -> Net {
    let mut fresh = Fresh::new();
    let mut inner = Net::new();
    let p = inner.add_free(&mut fresh, "p");
    let one = inner.add_cell(&mut fresh, Symbol::One, 0, None);
    let op = inner.cell(one).unwrap().principal;
    inner.connect(op, p, Formula::One);
    let mut n = Net::new();
    let b = n.add_cell(&mut fresh, Symbol::Box, 0, Some(inner));
    let bp = n.cell(b).unwrap().principal;
    let out = n.add_free(&mut fresh, "out");
    n.connect(bp, out, Formula::bang(Formula::One));
    n
}

/// γ: the communication area on three labels.
pub fn gamma_rel() -> Multirelation {
    Multirelation::communication(3)
}

/// δ: the communication area on four labels without (3,1) and (3,2).
pub fn delta_rel() -> Multirelation {
    let mut r = Multirelation::communication(4);
    r.set("3", "1", 0).unwrap();
    r.set("3", "2", 0).unwrap();
    r
}

pub fn gamma() -> Net {
    build_area(&RoutingArea::new(gamma_rel()))
}

pub fn delta() -> Net {
    build_area(&RoutingArea::new(delta_rel()))
}
