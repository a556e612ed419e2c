//! Port-graph representation of nets.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::Formula;

pub type PortId = u32;
pub type CellId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    One,
    Tensor,
    Par,
    Dereliction,
    Contraction,
    Weakening,
    Cocontraction,
    Coweakening,
    Box,
}

impl Symbol {
    pub const ALL: [Symbol; 9] = [
        Symbol::One,
        Symbol::Tensor,
        Symbol::Par,
        Symbol::Dereliction,
        Symbol::Contraction,
        Symbol::Weakening,
        Symbol::Cocontraction,
        Symbol::Coweakening,
        Symbol::Box,
    ];

    /// Name used in the JSON schema.
    pub fn name(self) -> &'static str {
        match self {
            Symbol::One => "one",
            Symbol::Tensor => "tensor",
            Symbol::Par => "par",
            Symbol::Dereliction => "der",
            Symbol::Contraction => "contr",
            Symbol::Weakening => "weak",
            Symbol::Cocontraction => "cocontr",
            Symbol::Coweakening => "coweak",
            Symbol::Box => "box",
        }
    }

    pub fn from_name(s: &str) -> Option<Symbol> {
        Symbol::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Fixed number of auxiliary ports; `None` for boxes.
    pub fn arity(self) -> Option<usize> {
        match self {
            Symbol::One | Symbol::Weakening | Symbol::Coweakening => Some(0),
            Symbol::Dereliction => Some(1),
            Symbol::Tensor | Symbol::Par | Symbol::Contraction | Symbol::Cocontraction => Some(2),
            Symbol::Box => None,
        }
    }

    pub fn is_structural(self) -> bool {
        matches!(
            self,
            Symbol::Contraction | Symbol::Weakening | Symbol::Cocontraction | Symbol::Coweakening
        )
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: CellId,
    pub symbol: Symbol,
    pub principal: PortId,
    pub aux: Vec<PortId>,
    pub inner: Option<Box<Net>>,
}

impl Cell {
    /// Port at slot `k`: 0 is the principal port, `k ≥ 1` is `aux[k-1]`.
    pub fn port(&self, slot: usize) -> PortId {
        if slot == 0 {
            self.principal
        } else {
            self.aux[slot - 1]
        }
    }

    pub fn ports(&self) -> impl Iterator<Item = PortId> + '_ {
        std::iter::once(self.principal).chain(self.aux.iter().copied())
    }

    pub fn is_closed_box(&self) -> bool {
        self.symbol == Symbol::Box && self.aux.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreePort {
    pub port: PortId,
    pub label: String,
}

/// One end of a wire: its peer and the formula read from this end toward the peer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub peer: PortId,
    pub ty: Formula,
}

/// A wire listed once, `ty` read from `a` to `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wire {
    pub a: PortId,
    pub b: PortId,
    pub ty: Formula,
}

/// Supply of identifiers shared by ports and cells, never reused.
#[derive(Clone, Debug)]
pub struct Fresh {
    next: u32,
}

impl Fresh {
    pub fn new() -> Fresh {
        Fresh { next: 0 }
    }

    /// Starts above every id occurring in `net`, boxes included.
    pub fn above(net: &Net) -> Fresh {
        Fresh {
            next: net.max_id().map_or(0, |m| m + 1),
        }
    }

    pub fn bump_above(&mut self, net: &Net) {
        if let Some(m) = net.max_id() {
            self.next = self.next.max(m + 1);
        }
    }

    pub fn next(&mut self) -> u32 {
        let v = self.next;
        self.next += 1;
        v
    }
}

impl Default for Fresh {
    fn default() -> Self {
        Fresh::new()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Net {
    pub(crate) free: Vec<FreePort>,
    pub(crate) cells: BTreeMap<CellId, Cell>,
    pub(crate) links: BTreeMap<PortId, Link>,
    pub(crate) owner: HashMap<PortId, (CellId, usize)>,
}

impl PartialEq for Net {
    fn eq(&self, other: &Self) -> bool {
        self.free == other.free && self.cells == other.cells && self.links == other.links
    }
}

impl Eq for Net {}

impl Net {
    pub fn new() -> Net {
        Net::default()
    }

    pub fn free_ports(&self) -> &[FreePort] {
        &self.free
    }

    pub fn free_port(&self, label: &str) -> Option<PortId> {
        self.free.iter().find(|f| f.label == label).map(|f| f.port)
    }

    pub fn label_of(&self, p: PortId) -> Option<&str> {
        self.free.iter().find(|f| f.port == p).map(|f| f.label.as_str())
    }

    pub fn is_free(&self, p: PortId) -> bool {
        self.free.iter().any(|f| f.port == p)
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.values()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Cells including those nested in boxes.
    pub fn deep_cell_count(&self) -> usize {
        self.cells
            .values()
            .map(|c| 1 + c.inner.as_ref().map_or(0, |n| n.deep_cell_count()))
            .sum()
    }

    pub fn cell(&self, id: CellId) -> Option<&Cell> {
        self.cells.get(&id)
    }

    pub fn cell_mut(&mut self, id: CellId) -> Option<&mut Cell> {
        self.cells.get_mut(&id)
    }

    pub fn has_boxes(&self) -> bool {
        self.cells.values().any(|c| c.symbol == Symbol::Box)
    }

    pub fn ports(&self) -> impl Iterator<Item = PortId> + '_ {
        self.links.keys().copied()
    }

    pub fn link(&self, p: PortId) -> Option<&Link> {
        self.links.get(&p)
    }

    pub fn peer(&self, p: PortId) -> Option<PortId> {
        self.links.get(&p).map(|l| l.peer)
    }

    /// Formula read from `p` toward its peer.
    pub fn ty_out(&self, p: PortId) -> Option<&Formula> {
        self.links.get(&p).map(|l| &l.ty)
    }

    /// Formula read from the peer toward `p`.
    pub fn ty_in(&self, p: PortId) -> Option<&Formula> {
        self.peer(p).and_then(|q| self.ty_out(q))
    }

    /// Owning cell and slot (0 = principal).
    pub fn owner(&self, p: PortId) -> Option<(CellId, usize)> {
        self.owner.get(&p).copied()
    }

    pub fn owner_cell(&self, p: PortId) -> Option<&Cell> {
        self.owner(p).and_then(|(c, _)| self.cells.get(&c))
    }

    /// Wires listed once each, keyed by their smaller port.
    pub fn wires(&self) -> Vec<Wire> {
        self.links
            .iter()
            .filter(|(p, l)| **p < l.peer)
            .map(|(p, l)| Wire {
                a: *p,
                b: l.peer,
                ty: l.ty.clone(),
            })
            .collect()
    }

    pub fn max_id(&self) -> Option<u32> {
        let mut m: Option<u32> = None;
        let mut see = |x: u32| m = Some(m.map_or(x, |y: u32| y.max(x)));
        for p in self.links.keys() {
            see(*p);
        }
        for f in &self.free {
            see(f.port);
        }
        for c in self.cells.values() {
            see(c.id);
            for p in c.ports() {
                see(p);
            }
            if let Some(inner) = &c.inner {
                if let Some(x) = inner.max_id() {
                    see(x);
                }
            }
        }
        m
    }

    pub fn add_free(&mut self, fresh: &mut Fresh, label: impl Into<String>) -> PortId {
        let p = fresh.next();
        self.free.push(FreePort {
            port: p,
            label: label.into(),
        });
        p
    }

    pub(crate) fn push_free(&mut self, port: PortId, label: impl Into<String>) {
        self.free.push(FreePort {
            port,
            label: label.into(),
        });
    }

    pub fn remove_free(&mut self, p: PortId) -> Option<FreePort> {
        let i = self.free.iter().position(|f| f.port == p)?;
        Some(self.free.remove(i))
    }

    pub fn relabel_free(&mut self, p: PortId, label: impl Into<String>) {
        if let Some(f) = self.free.iter_mut().find(|f| f.port == p) {
            f.label = label.into();
        }
    }

    /// Adds a cell with fresh ports; returns its id.
    pub fn add_cell(
        &mut self,
        fresh: &mut Fresh,
        symbol: Symbol,
        n_aux: usize,
        inner: Option<Net>,
    ) -> CellId {
        let id = fresh.next();
        let principal = fresh.next();
        let aux: Vec<PortId> = (0..n_aux).map(|_| fresh.next()).collect();
        self.insert_cell(Cell {
            id,
            symbol,
            principal,
            aux,
            inner: inner.map(Box::new),
        });
        id
    }

    pub fn insert_cell(&mut self, cell: Cell) {
        for (k, p) in cell.ports().enumerate() {
            self.owner.insert(p, (cell.id, k));
        }
        self.cells.insert(cell.id, cell);
    }

    /// Removes a cell; its wires stay dangling until the caller rewires them.
    pub fn remove_cell(&mut self, id: CellId) -> Option<Cell> {
        let c = self.cells.remove(&id)?;
        for p in c.ports() {
            self.owner.remove(&p);
        }
        Some(c)
    }

    /// Wires `a` to `b`; `ty` is read from `a` to `b`.
    pub fn connect(&mut self, a: PortId, b: PortId, ty: Formula) {
        let back = ty.dual();
        self.links.insert(a, Link { peer: b, ty });
        self.links.insert(b, Link { peer: a, ty: back });
    }

    /// Removes the wire at `p`; returns its peer and the formula read from `p`.
    pub fn disconnect(&mut self, p: PortId) -> Option<(PortId, Formula)> {
        let l = self.links.remove(&p)?;
        self.links.remove(&l.peer);
        Some((l.peer, l.ty))
    }

    /// Joins the wire arriving at `p` with the wire leaving `q`, dropping both
    /// ports: `peer(p)` to `peer(q)`. A wire from `p` to `q` closes into a loop and vanishes.
    pub fn fuse(&mut self, p: PortId, q: PortId) {
        let lp = self.links.remove(&p).expect("fuse: unwired port");
        if lp.peer == q {
            self.links.remove(&q);
            return;
        }
        self.links.remove(&lp.peer);
        let lq = self.links.remove(&q).expect("fuse: unwired port");
        self.links.remove(&lq.peer);
        // formula read from peer(p) toward p continues out of q
        let ty = lp.ty.dual();
        self.connect(lp.peer, lq.peer, ty);
    }

    /// Rewires the far end of the wire at `p` onto `to`; `p` is dropped.
    pub fn move_wire(&mut self, p: PortId, to: PortId) {
        let l = self.links.remove(&p).expect("move_wire: unwired port");
        self.links.remove(&l.peer);
        self.connect(to, l.peer, l.ty);
    }

    /// Copy with every id renamed from `fresh`; returns the copy and the port map.
    pub fn deep_copy(&self, fresh: &mut Fresh) -> (Net, HashMap<PortId, PortId>) {
        let mut map: HashMap<PortId, PortId> = HashMap::new();
        let mut out = Net::new();
        for p in self.links.keys() {
            map.entry(*p).or_insert_with(|| fresh.next());
        }
        for f in &self.free {
            let np = *map.entry(f.port).or_insert_with(|| fresh.next());
            out.free.push(FreePort {
                port: np,
                label: f.label.clone(),
            });
        }
        for c in self.cells.values() {
            let mut ren = |p: PortId| *map.entry(p).or_insert_with(|| fresh.next());
            let principal = ren(c.principal);
            let aux = c.aux.iter().map(|p| ren(*p)).collect();
            let inner = c.inner.as_ref().map(|n| Box::new(n.deep_copy(fresh).0));
            out.insert_cell(Cell {
                id: fresh.next(),
                symbol: c.symbol,
                principal,
                aux,
                inner,
            });
        }
        for (p, l) in &self.links {
            out.links.insert(
                map[p],
                Link {
                    peer: map[&l.peer],
                    ty: l.ty.clone(),
                },
            );
        }
        (out, map)
    }

    /// Moves every cell, wire and free port of `other` into `self` (ids must be disjoint).
    pub fn absorb(&mut self, other: Net) {
        self.free.extend(other.free);
        for (_, c) in other.cells {
            self.insert_cell(c);
        }
        self.links.extend(other.links);
    }

    /// Formula read toward free port `p` from inside the net.
    pub fn free_type(&self, p: PortId) -> Option<&Formula> {
        self.ty_in(p)
    }
}
