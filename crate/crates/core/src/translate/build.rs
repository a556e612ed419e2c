//! Net-building helpers. Every fragment is a net whose open ends are free
//! ports; fragments are glued by plugging two free ports with dual conclusions.

use crate::proofnet::{Formula, Fresh, Net, PortId, Symbol};

pub(crate) struct Builder {
    pub fresh: Fresh,
}

impl Builder {
    pub fn new() -> Builder {
        Builder { fresh: Fresh::new() }
    }

    /// Conclusion of free port `p`.
    pub fn concl(n: &Net, p: PortId) -> Formula {
        n.free_type(p).expect("free port is wired").clone()
    }

    /// A cell whose ports are each wired to a new free port. The principal's free
    /// port concludes `principal`; the free port of aux `k` concludes `premises[k]^⊥`.
    pub fn gadget(&mut self, n: &mut Net, sym: Symbol, principal: Formula, premises: &[Formula], inner: Option<Net>) -> (PortId, Vec<PortId>) {
        let id = n.add_cell(&mut self.fresh, sym, premises.len(), inner);
        let c = n.cell(id).unwrap().clone();
        let fp = n.add_free(&mut self.fresh, "");
        n.connect(c.principal, fp, principal);
        let aux = c
            .aux
            .iter()
            .zip(premises)
            .map(|(a, f)| {
                let fa = n.add_free(&mut self.fresh, "");
                n.connect(*a, fa, f.dual());
                fa
            })
            .collect();
        (fp, aux)
    }

    /// Two free ports joined by a wire; the first concludes `c`, the second `c^⊥`.
    pub fn wire(&mut self, n: &mut Net, c: Formula) -> (PortId, PortId) {
        let a = n.add_free(&mut self.fresh, "");
        let b = n.add_free(&mut self.fresh, "");
        n.connect(b, a, c);
        (a, b)
    }

    /// Joins free ports `p` and `q`, which must have dual conclusions.
    pub fn plug(n: &mut Net, p: PortId, q: PortId) {
        debug_assert_eq!(Builder::concl(n, p), Builder::concl(n, q).dual(), "plugging {p} into {q}");
        n.fuse(p, q);
        n.remove_free(p);
        n.remove_free(q);
    }

    /// A free port concluding `c` (a `!` or `?` formula) backed by a nullary cell.
    pub fn stub(&mut self, n: &mut Net, c: Formula) -> PortId {
        let sym = if c.unbang().is_some() { Symbol::Coweakening } else { Symbol::Weakening };
        self.gadget(n, sym, c, &[], None).0
    }

    /// Closes free port `p` with a nullary cell.
    pub fn cap(&mut self, n: &mut Net, p: PortId) {
        let s = self.stub(n, Builder::concl(n, p).dual());
        Builder::plug(n, s, p);
    }

    /// Right-folded tree of binary `sym` cells over `ports`; returns the root's free port.
    pub fn fold(&mut self, n: &mut Net, sym: Symbol, ports: &[PortId]) -> PortId {
        match ports {
            [] => panic!("fold of nothing"),
            [p] => *p,
            [p, rest @ ..] => {
                let r = self.fold(n, sym, rest);
                let (a, b) = (Builder::concl(n, *p), Builder::concl(n, r));
                let top = if sym == Symbol::Tensor {
                    Formula::tensor(a.clone(), b.clone())
                } else {
                    Formula::par(a.clone(), b.clone())
                };
                let (root, aux) = self.gadget(n, sym, top, &[a, b], None);
                Builder::plug(n, aux[0], *p);
                Builder::plug(n, aux[1], r);
                root
            }
        }
    }

    /// Inverse of a right fold of `k` components at `p`: returns the component ports.
    pub fn split(&mut self, n: &mut Net, p: PortId, k: usize) -> Vec<PortId> {
        if k <= 1 {
            return vec![p];
        }
        let c = Builder::concl(n, p);
        let (sym, a, b) = match &c {
            Formula::Par(a, b) => (Symbol::Tensor, a.dual(), b.dual()),
            Formula::Tensor(a, b) => (Symbol::Par, a.dual(), b.dual()),
            _ => panic!("split of {c}"),
        };
        let (root, aux) = self.gadget(n, sym, c.dual(), &[a, b], None);
        Builder::plug(n, root, p);
        let mut out = vec![aux[0]];
        out.extend(self.split(n, aux[1], k - 1));
        out
    }

    /// Joins ports concluding `c` with a comb of `sym` (contraction or cocontraction);
    /// none gives a nullary stub.
    fn join(&mut self, n: &mut Net, sym: Symbol, c: &Formula, ports: &[PortId]) -> PortId {
        match ports {
            [] => self.stub(n, c.clone()),
            [p] => *p,
            [p, rest @ ..] => {
                let r = self.join(n, sym, c, rest);
                let (root, aux) = self.gadget(n, sym, c.clone(), &[c.clone(), c.clone()], None);
                Builder::plug(n, aux[0], *p);
                Builder::plug(n, aux[1], r);
                root
            }
        }
    }

    /// Ports concluding `!A` merged by cocontractions.
    pub fn merge(&mut self, n: &mut Net, c: &Formula, ports: &[PortId]) -> PortId {
        self.join(n, Symbol::Cocontraction, c, ports)
    }

    /// Ports concluding `?A` merged by contractions.
    pub fn contract(&mut self, n: &mut Net, c: &Formula, ports: &[PortId]) -> PortId {
        self.join(n, Symbol::Contraction, c, ports)
    }

    /// Boxes `inner` with principal `p` and `doors` in order, inside `outer`.
    /// Returns the free ports of the principal and of the doors in `outer`.
    pub fn boxed(&mut self, outer: &mut Net, mut inner: Net, p: PortId, doors: &[PortId]) -> (PortId, Vec<PortId>) {
        for &d in doors {
            if inner.peer(d) == Some(p) {
                self.eta(&mut inner, p, d);
            }
        }
        let mut order = vec![p];
        order.extend_from_slice(doors);
        assert_eq!(order.len(), inner.free_ports().len(), "box interface does not cover the inner net");
        for &q in &order {
            let f = inner.remove_free(q).expect("box port is free");
            inner.push_free(q, f.label);
        }
        let principal = Formula::bang(Builder::concl(&inner, p));
        let door_concl: Vec<Formula> = doors.iter().map(|d| Builder::concl(&inner, *d)).collect();
        let premises: Vec<Formula> = door_concl.iter().map(Formula::dual).collect();
        self.gadget(outer, Symbol::Box, principal, &premises, Some(inner))
    }

    /// Replaces the wire between free ports `p` (concluding `!X`) and `d` by a box around a dereliction.
    fn eta(&mut self, n: &mut Net, p: PortId, d: PortId) {
        let cp = Builder::concl(n, p);
        let cd = Builder::concl(n, d);
        let x = cp.unbang().expect("η-expansion of a !-wire").clone();
        let mut inner = Net::new();
        let (dp, daux) = self.gadget(&mut inner, Symbol::Dereliction, cd.clone(), &[x.dual()], None);
        let (bp, bdoors) = self.boxed(n, inner, daux[0], &[dp]);
        n.disconnect(p);
        let (bpp, _) = n.disconnect(bp).unwrap();
        let (bdd, _) = n.disconnect(bdoors[0]).unwrap();
        n.remove_free(bp);
        n.remove_free(bdoors[0]);
        n.connect(bpp, p, cp);
        n.connect(bdd, d, cd);
    }
}
