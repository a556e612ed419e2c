//! Well-formedness and typing of nets.

use std::collections::HashMap;
use std::fmt;

use super::{CellId, Formula, Net, PortId, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Port with no wire, or a wire whose far end does not point back.
    UnpairedPort { port: PortId },
    /// Wire from a port to itself.
    SelfWire { port: PortId },
    /// Port occurring in two cell slots, or free and in a cell.
    PortReuse { port: PortId },
    /// Wired port that belongs to no cell and is not free.
    OrphanPort { port: PortId },
    ArityMismatch { cell: CellId, symbol: Symbol, aux: usize },
    TypeMismatch { cell: CellId, slot: usize, expected: String, found: String },
    BoxInterface { cell: CellId, reason: String },
    BoxFloatingWire { cell: CellId, port: PortId },
    InsideBox { cell: CellId, violation: Box<Violation> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnpairedPort { port } => write!(f, "UnpairedPort port={port}"),
            Violation::SelfWire { port } => write!(f, "SelfWire port={port}"),
            Violation::PortReuse { port } => write!(f, "PortReuse port={port}"),
            Violation::OrphanPort { port } => write!(f, "OrphanPort port={port}"),
            Violation::ArityMismatch { cell, symbol, aux } => {
                write!(f, "ArityMismatch cell={cell} sym={symbol} aux={aux}")
            }
            Violation::TypeMismatch {
                cell,
                slot,
                expected,
                found,
            } => write!(
                f,
                "TypeMismatch cell={cell} slot={slot} expected={expected} found={found}"
            ),
            Violation::BoxInterface { cell, reason } => {
                write!(f, "BoxInterface cell={cell}: {reason}")
            }
            Violation::BoxFloatingWire { cell, port } => {
                write!(f, "BoxFloatingWire cell={cell} port={port}")
            }
            Violation::InsideBox { cell, violation } => write!(f, "in box {cell}: {violation}"),
        }
    }
}

impl Violation {
    /// Innermost violation, unwrapping box nesting.
    pub fn root(&self) -> &Violation {
        match self {
            Violation::InsideBox { violation, .. } => violation.root(),
            v => v,
        }
    }
}

/// Every violated invariant, recursively inside boxes. Empty iff the net is well formed.
pub fn validate(n: &Net) -> Vec<Violation> {
    let mut out = Vec::new();
    check(n, &mut out);
    out
}

fn check(n: &Net, out: &mut Vec<Violation>) {
    // wires pair ports
    for (p, l) in &n.links {
        if l.peer == *p {
            out.push(Violation::SelfWire { port: *p });
            continue;
        }
        match n.links.get(&l.peer) {
            Some(back) if back.peer == *p && back.ty == l.ty.dual() => {}
            _ => out.push(Violation::UnpairedPort { port: *p }),
        }
    }
    // slots
    let mut seen: HashMap<PortId, u32> = HashMap::new();
    for f in &n.free {
        *seen.entry(f.port).or_default() += 1;
    }
    for c in n.cells.values() {
        for p in c.ports() {
            *seen.entry(p).or_default() += 1;
        }
    }
    let mut reused: Vec<PortId> = seen.iter().filter(|(_, k)| **k > 1).map(|(p, _)| *p).collect();
    reused.sort();
    out.extend(reused.into_iter().map(|port| Violation::PortReuse { port }));
    let mut unwired: Vec<PortId> = seen.keys().filter(|p| !n.links.contains_key(p)).copied().collect();
    unwired.sort();
    out.extend(unwired.into_iter().map(|port| Violation::UnpairedPort { port }));
    for p in n.links.keys() {
        if !seen.contains_key(p) {
            out.push(Violation::OrphanPort { port: *p });
        }
    }
    for c in n.cells.values() {
        if let Some(k) = c.symbol.arity() {
            if c.aux.len() != k {
                out.push(Violation::ArityMismatch {
                    cell: c.id,
                    symbol: c.symbol,
                    aux: c.aux.len(),
                });
                continue;
            }
        }
        if c.ports().any(|p| !n.links.contains_key(&p)) {
            continue;
        }
        check_cell_types(n, c.id, out);
    }
}

fn mismatch(cell: CellId, slot: usize, expected: impl fmt::Display, found: &Formula) -> Violation {
    Violation::TypeMismatch {
        cell,
        slot,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn check_cell_types(n: &Net, id: CellId, out: &mut Vec<Violation>) {
    let c = &n.cells[&id];
    let pr = n.ty_out(c.principal).unwrap();
    let aux_in: Vec<&Formula> = c.aux.iter().map(|p| n.ty_in(*p).unwrap()).collect();
    match c.symbol {
        Symbol::One => {
            if *pr != Formula::One {
                out.push(mismatch(id, 0, "1", pr));
            }
        }
        Symbol::Tensor | Symbol::Par => {
            let want = if c.symbol == Symbol::Tensor {
                Formula::tensor(aux_in[0].clone(), aux_in[1].clone())
            } else {
                Formula::par(aux_in[0].clone(), aux_in[1].clone())
            };
            if *pr != want {
                out.push(mismatch(id, 0, want, pr));
            }
        }
        Symbol::Dereliction => {
            let want = Formula::whynot(aux_in[0].clone());
            if *pr != want {
                out.push(mismatch(id, 0, want, pr));
            }
        }
        Symbol::Weakening => {
            if pr.unwhynot().is_none() {
                out.push(mismatch(id, 0, "?A", pr));
            }
        }
        Symbol::Coweakening => {
            if pr.unbang().is_none() {
                out.push(mismatch(id, 0, "!A", pr));
            }
        }
        Symbol::Contraction | Symbol::Cocontraction => {
            let ok = if c.symbol == Symbol::Contraction {
                pr.unwhynot().is_some()
            } else {
                pr.unbang().is_some()
            };
            if !ok {
                let e = if c.symbol == Symbol::Contraction { "?A" } else { "!A" };
                out.push(mismatch(id, 0, e, pr));
            }
            for (k, a) in aux_in.iter().enumerate() {
                if *a != pr {
                    out.push(mismatch(id, k + 1, pr, a));
                }
            }
        }
        Symbol::Box => check_box(n, id, out),
    }
}

fn check_box(n: &Net, id: CellId, out: &mut Vec<Violation>) {
    let c = &n.cells[&id];
    let Some(inner) = c.inner.as_deref() else {
        out.push(Violation::BoxInterface {
            cell: id,
            reason: "box without inner net".into(),
        });
        return;
    };
    for v in validate(inner) {
        out.push(Violation::InsideBox {
            cell: id,
            violation: Box::new(v),
        });
    }
    if inner.free.len() != c.aux.len() + 1 {
        out.push(Violation::BoxInterface {
            cell: id,
            reason: format!(
                "inner net has {} free ports, box has {} doors",
                inner.free.len(),
                c.aux.len()
            ),
        });
        return;
    }
    for f in &inner.free {
        if let Some(q) = inner.peer(f.port) {
            if inner.is_free(q) {
                out.push(Violation::BoxFloatingWire { cell: id, port: f.port });
            }
        }
    }
    let pr = n.ty_out(c.principal).unwrap();
    if let Some(a) = inner.free_type(inner.free[0].port) {
        let want = Formula::bang(a.clone());
        if *pr != want {
            out.push(mismatch(id, 0, want, pr));
        }
    }
    for (k, door) in c.aux.iter().enumerate() {
        let outer_in = n.ty_in(*door).unwrap();
        if outer_in.unbang().is_none() {
            out.push(mismatch(id, k + 1, "!B", outer_in));
        }
        if let Some(inner_in) = inner.ty_out(inner.free[k + 1].port) {
            if inner_in != outer_in {
                out.push(mismatch(id, k + 1, inner_in, outer_in));
            }
        }
    }
}
