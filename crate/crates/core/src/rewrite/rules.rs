//! Right-hand sides of the reduction rules, applied in place.

use crate::proofnet::{Cell, CellId, Fresh, Net, PortId, Symbol};

use super::Rule;

/// Principal–principal or box–door cut on the wire at `a`/`b`, if any.
pub(super) fn classify(n: &Net, a: PortId, b: PortId) -> Option<(Rule, Vec<CellId>)> {
    let (ca, sa) = n.owner(a)?;
    let (cb, sb) = n.owner(b)?;
    if ca == cb {
        return None;
    }
    let x = n.cell(ca)?;
    let y = n.cell(cb)?;
    if sa != 0 || sb != 0 {
        // closed box principal against another box's door
        let (p, q) = match (sa, sb) {
            (0, k) if k > 0 => (y, x),
            (k, 0) if k > 0 => (x, y),
            _ => return None,
        };
        if p.symbol == Symbol::Box && q.is_closed_box() {
            return Some((Rule::C, vec![p.id, q.id]));
        }
        return None;
    }
    use Symbol::*;
    let ordered = |r: Rule, first: &Cell, second: &Cell| Some((r, vec![first.id, second.id]));
    for (u, v) in [(x, y), (y, x)] {
        let hit = match (u.symbol, v.symbol) {
            (Tensor, Par) => ordered(Rule::M, u, v),
            (Dereliction, Box) if v.is_closed_box() => ordered(Rule::E, u, v),
            (Contraction, Box) if v.is_closed_box() => ordered(Rule::D, u, v),
            (Weakening, Box) if v.is_closed_box() => ordered(Rule::Er, u, v),
            (Dereliction, Cocontraction) => ordered(Rule::Nd, u, v),
            (Cocontraction, Contraction) => ordered(Rule::Ba, u, v),
            (Coweakening, Contraction) => ordered(Rule::S1, u, v),
            (Cocontraction, Weakening) => ordered(Rule::S2, u, v),
            (Coweakening, Weakening) => ordered(Rule::EpsWw, u, v),
            (Coweakening, Dereliction) => ordered(Rule::ZeroWd, u, v),
            _ => None,
        };
        if hit.is_some() {
            return hit;
        }
    }
    None
}

fn take(n: &mut Net, id: CellId) -> Cell {
    n.remove_cell(id).expect("redex cell present")
}

fn fresh_cell(n: &mut Net, fresh: &mut Fresh, sym: Symbol, aux: usize) -> Cell {
    let id = n.add_cell(fresh, sym, aux, None);
    n.cell(id).unwrap().clone()
}

/// Removes two cells cut on their principal ports.
fn cut_pair(n: &mut Net, x: CellId, y: CellId) -> (Cell, Cell) {
    let cx = take(n, x);
    let cy = take(n, y);
    n.disconnect(cx.principal);
    (cx, cy)
}

pub(super) fn m(n: &mut Net, t: CellId, p: CellId) {
    let (t, p) = cut_pair(n, t, p);
    n.fuse(t.aux[0], p.aux[0]);
    n.fuse(t.aux[1], p.aux[1]);
}

pub(super) fn e(n: &mut Net, d: CellId, b: CellId) {
    let (d, b) = cut_pair(n, d, b);
    let mut inner = *b.inner.expect("box body");
    let p0 = inner.free_ports()[0].port;
    let u = inner.peer(p0).expect("wired body");
    let ty = inner.ty_in(p0).unwrap().clone();
    inner.disconnect(p0);
    inner.remove_free(p0);
    n.absorb(inner);
    let z = n.peer(d.aux[0]).expect("wired dereliction");
    n.disconnect(d.aux[0]);
    n.connect(u, z, ty);
}

pub(super) fn d(n: &mut Net, c: CellId, b: CellId, fresh: &mut Fresh) {
    let ct = take(n, c);
    n.disconnect(ct.principal);
    let bx = n.cell(b).unwrap().clone();
    let copy = Cell {
        id: fresh.next(),
        symbol: Symbol::Box,
        principal: fresh.next(),
        aux: Vec::new(),
        inner: bx.inner.as_ref().map(|i| Box::new(i.deep_copy(fresh).0)),
    };
    let cp = copy.principal;
    n.insert_cell(copy);
    n.move_wire(ct.aux[0], bx.principal);
    n.move_wire(ct.aux[1], cp);
}

pub(super) fn erase(n: &mut Net, x: CellId, y: CellId) {
    cut_pair(n, x, y);
}

pub(super) fn c(n: &mut Net, p: CellId, q: CellId) {
    let qc = take(n, q);
    let door = n.peer(qc.principal).expect("wired box");
    n.disconnect(qc.principal);
    let mut pc = take(n, p);
    let k = pc.aux.iter().position(|a| *a == door).expect("door of p");
    pc.aux.remove(k);
    let inner = pc.inner.as_mut().expect("box body");
    let fp = inner.free_ports()[k + 1].port;
    let v = inner.peer(fp).expect("wired door");
    let ty = inner.ty_out(fp).unwrap().clone();
    inner.disconnect(fp);
    inner.remove_free(fp);
    let qp = qc.principal;
    inner.insert_cell(qc);
    inner.connect(qp, v, ty);
    n.insert_cell(pc);
}

/// One branch of nd: the dereliction picks cocontraction input `pick`.
pub(super) fn nd(n: &mut Net, d: CellId, k: CellId, pick: usize, fresh: &mut Fresh) {
    let (d, k) = cut_pair(n, d, k);
    let nd = fresh_cell(n, fresh, Symbol::Dereliction, 1);
    let w = fresh_cell(n, fresh, Symbol::Weakening, 0);
    n.move_wire(k.aux[pick], nd.principal);
    n.move_wire(k.aux[1 - pick], w.principal);
    n.move_wire(d.aux[0], nd.aux[0]);
}

pub(super) fn ba(n: &mut Net, k: CellId, c: CellId, fresh: &mut Fresh) {
    let t = n.ty_out(n.cell(k).unwrap().principal).unwrap().clone();
    let (k, c) = cut_pair(n, k, c);
    let ka = fresh_cell(n, fresh, Symbol::Contraction, 2);
    let kb = fresh_cell(n, fresh, Symbol::Contraction, 2);
    let cc = fresh_cell(n, fresh, Symbol::Cocontraction, 2);
    let cd = fresh_cell(n, fresh, Symbol::Cocontraction, 2);
    n.move_wire(k.aux[0], ka.principal);
    n.move_wire(k.aux[1], kb.principal);
    n.move_wire(c.aux[0], cc.principal);
    n.move_wire(c.aux[1], cd.principal);
    let w = t.dual();
    n.connect(cc.aux[0], ka.aux[0], w.clone());
    n.connect(cd.aux[0], ka.aux[1], w.clone());
    n.connect(cc.aux[1], kb.aux[0], w.clone());
    n.connect(cd.aux[1], kb.aux[1], w);
}

/// s1 and s2: the nullary cell is copied onto both inputs of the binary one.
pub(super) fn spread(n: &mut Net, x: CellId, y: CellId, fresh: &mut Fresh) {
    let (x, y) = cut_pair(n, x, y);
    let (u, b) = if x.aux.is_empty() { (x, y) } else { (y, x) };
    for a in b.aux {
        let c = fresh_cell(n, fresh, u.symbol, 0);
        n.move_wire(a, c.principal);
    }
}
