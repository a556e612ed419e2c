//! Seeded random generators for the verification suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::lang::TermA;
use crate::multirel::Multirelation;
use crate::paths::check_acyclic;
use crate::proofnet::{validate, Formula, Fresh, Net, PortId, Symbol};
use crate::rewrite::{find_redexes, Policy};
use crate::routing::{input_label, output_label};
use crate::translate::build::Builder;

/// Area on labels `1..=n` by `1..=m` with entries in `0..=max`.
pub fn area(rng: &mut impl Rng, max_in: usize, max_out: usize, max: u64) -> Multirelation {
    let n = rng.gen_range(1..=max_in);
    let m = rng.gen_range(1..=max_out);
    square(rng, n, m, max)
}

pub fn square(rng: &mut impl Rng, n: usize, m: usize, max: u64) -> Multirelation {
    let ins: Vec<String> = (1..=n).map(|k| k.to_string()).collect();
    let outs: Vec<String> = (1..=m).map(|k| k.to_string()).collect();
    let rows: Vec<Vec<u64>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(0..=max)).collect()).collect();
    Multirelation::from_rows(&ins, &outs, &rows).unwrap()
}

/// An area with a chosen pair `(i, o)` where `R(i,o) = 0`.
pub fn trace_case(rng: &mut impl Rng) -> (Multirelation, String, String) {
    let mut r = area(rng, 4, 4, 3);
    let zeros: Vec<(String, String)> = r
        .domain()
        .iter()
        .flat_map(|i| r.codomain().iter().map(move |o| (i.to_string(), o.to_string())))
        .filter(|(i, o)| r.get(i, o) == 0)
        .collect();
    let (i, o) = match zeros.choose(rng) {
        Some(p) => p.clone(),
        None => {
            let i = r.domain().as_slice().choose(rng).unwrap().clone();
            let o = r.codomain().as_slice().choose(rng).unwrap().clone();
            r.set(&i, &o, 0).unwrap();
            (i, o)
        }
    };
    (r, i, o)
}

/// A random routing net on `!1` with at most `max_cells` cells: structural cells
/// wired at random, leftover ports becoming inputs and outputs. Cyclic draws are retried.
pub fn routing_net(rng: &mut impl Rng, max_cells: usize) -> Net {
    let bang = Formula::bang(Formula::One);
    let why = bang.dual();
    loop {
        let mut fresh = Fresh::new();
        let mut n = Net::new();
        // ports read `?A` outward and ports read `!A` outward
        let mut q: Vec<PortId> = Vec::new();
        let mut b: Vec<PortId> = Vec::new();
        for _ in 0..rng.gen_range(1..=max_cells) {
            let sym = *[Symbol::Contraction, Symbol::Cocontraction, Symbol::Weakening, Symbol::Coweakening]
                .choose(rng)
                .unwrap();
            let k = if matches!(sym, Symbol::Contraction | Symbol::Cocontraction) { 2 } else { 0 };
            let id = n.add_cell(&mut fresh, sym, k, None);
            let c = n.cell(id).unwrap().clone();
            let whyish = matches!(sym, Symbol::Contraction | Symbol::Weakening);
            if whyish {
                q.push(c.principal);
                b.extend(&c.aux);
            } else {
                b.push(c.principal);
                q.extend(&c.aux);
            }
        }
        q.shuffle(rng);
        b.shuffle(rng);
        let pairs = rng.gen_range(0..=q.len().min(b.len()));
        for _ in 0..pairs {
            let (x, y) = (q.pop().unwrap(), b.pop().unwrap());
            n.connect(x, y, why.clone());
        }
        let (mut ni, mut no) = (0, 0);
        for x in q {
            ni += 1;
            let f = n.add_free(&mut fresh, input_label(&ni.to_string()));
            n.connect(x, f, why.clone());
        }
        for y in b {
            no += 1;
            let f = n.add_free(&mut fresh, output_label(&no.to_string()));
            n.connect(y, f, bang.clone());
        }
        if check_acyclic(&n) == Ok(true) && validate(&n).is_empty() {
            return n;
        }
    }
}

/// A random formula of bounded depth.
pub fn formula(rng: &mut impl Rng, depth: usize) -> Formula {
    if depth == 0 {
        return if rng.gen_bool(0.5) { Formula::One } else { Formula::Bottom };
    }
    match rng.gen_range(0..6) {
        0 => Formula::One,
        1 => Formula::Bottom,
        2 => Formula::bang(formula(rng, depth - 1)),
        3 => Formula::whynot(formula(rng, depth - 1)),
        4 => Formula::tensor(formula(rng, depth - 1), formula(rng, depth - 1)),
        _ => Formula::par(formula(rng, depth - 1), formula(rng, depth - 1)),
    }
}

/// Builder of random correct nets: free ports tagged with a component id so
/// tensors and cuts only join distinct components.
struct Grow<'a, R: Rng> {
    rng: &'a mut R,
    b: Builder,
    comp: Vec<(PortId, usize)>,
    next_comp: usize,
    /// Set while building box contents for a cut, to keep such boxes closed where possible.
    closed: bool,
}

impl<R: Rng> Grow<'_, R> {
    fn new_comp(&mut self) -> usize {
        self.next_comp += 1;
        self.next_comp
    }

    fn take(&mut self, i: usize) -> (PortId, usize) {
        self.comp.swap_remove(i)
    }

    fn merge(&mut self, from: usize, to: usize) {
        for (_, c) in self.comp.iter_mut() {
            if *c == from {
                *c = to;
            }
        }
    }

    fn pick(&mut self, pred: impl Fn(&Formula) -> bool, n: &Net) -> Option<usize> {
        let idx: Vec<usize> = (0..self.comp.len()).filter(|&i| pred(&Builder::concl(n, self.comp[i].0))).collect();
        idx.choose(self.rng).copied()
    }

    /// One construction step; returns false if it did not apply.
    fn step(&mut self, n: &mut Net, depth: usize) -> bool {
        match self.rng.gen_range(0..14) {
            0 => {
                let f = formula(self.rng, 2);
                let (a, b) = self.b.wire(n, f);
                let c = self.new_comp();
                self.comp.push((a, c));
                self.comp.push((b, c));
            }
            1 => {
                let (p, _) = self.b.gadget(n, Symbol::One, Formula::One, &[], None);
                let c = self.new_comp();
                self.comp.push((p, c));
            }
            2 | 3 => {
                let tensor = self.rng.gen_bool(0.5);
                if self.comp.len() < 2 {
                    return false;
                }
                let i = self.rng.gen_range(0..self.comp.len());
                let (p, cp) = self.take(i);
                let j = self.rng.gen_range(0..self.comp.len());
                let (q, cq) = self.comp[j];
                if tensor && cp == cq {
                    self.comp.push((p, cp));
                    return false;
                }
                self.take(j);
                let sym = if tensor { Symbol::Tensor } else { Symbol::Par };
                let r = self.b.fold(n, sym, &[p, q]);
                self.merge(cq, cp);
                self.comp.push((r, cp));
            }
            4 => {
                if self.comp.is_empty() {
                    return false;
                }
                let i = self.rng.gen_range(0..self.comp.len());
                let (p, c) = self.take(i);
                let a = Builder::concl(n, p);
                let (r, aux) = self.b.gadget(n, Symbol::Dereliction, Formula::whynot(a.clone()), &[a], None);
                Builder::plug(n, aux[0], p);
                self.comp.push((r, c));
            }
            5 => {
                let f = formula(self.rng, 1);
                let c = self.new_comp();
                let concl = if self.rng.gen_bool(0.5) { Formula::bang(f) } else { Formula::whynot(f) };
                let p = self.b.stub(n, concl);
                self.comp.push((p, c));
            }
            6 | 7 => {
                let co = self.rng.gen_bool(0.5);
                let Some(i) = self.pick(|f| if co { f.unbang().is_some() } else { f.unwhynot().is_some() }, n) else {
                    return false;
                };
                let (p, cp) = self.take(i);
                let c = Builder::concl(n, p);
                let Some(j) = self.pick(|f| *f == c, n) else {
                    self.comp.push((p, cp));
                    return false;
                };
                let (q, cq) = self.take(j);
                let r = if co { self.b.merge(n, &c, &[p, q]) } else { self.b.contract(n, &c, &[p, q]) };
                self.merge(cq, cp);
                self.comp.push((r, cp));
            }
            8 | 9 => {
                if self.comp.len() < 2 {
                    return false;
                }
                let i = self.rng.gen_range(0..self.comp.len());
                let (p, cp) = self.take(i);
                let d = Builder::concl(n, p).dual();
                let cands: Vec<usize> = (0..self.comp.len())
                    .filter(|&j| self.comp[j].1 != cp && Builder::concl(n, self.comp[j].0) == d)
                    .collect();
                let Some(&j) = cands.choose(self.rng) else {
                    self.comp.push((p, cp));
                    return false;
                };
                let (q, cq) = self.take(j);
                Builder::plug(n, p, q);
                self.merge(cq, cp);
            }
            11..=13 => return self.cut(n, depth),
            _ => {
                if depth == 0 {
                    return false;
                }
                let (inner, p, doors) = self.inner(depth - 1);
                let (bp, bd) = self.b.boxed(n, inner, p, &doors);
                let c = self.new_comp();
                self.comp.push((bp, c));
                for d in bd {
                    self.comp.push((d, c));
                }
            }
        }
        true
    }

    /// Cuts a free port against a fragment built for its dual.
    fn cut(&mut self, n: &mut Net, depth: usize) -> bool {
        // ports facing a principal port or a box door make redexes; others only extend the net
        let principal: Vec<usize> = (0..self.comp.len())
            .filter(|&i| {
                n.peer(self.comp[i].0)
                    .and_then(|q| n.owner(q))
                    .is_some_and(|(c, slot)| slot == 0 || n.cell(c).is_some_and(|c| c.symbol == Symbol::Box))
            })
            .collect();
        let i = match principal.choose(self.rng) {
            Some(&i) => i,
            None if self.comp.is_empty() => return false,
            None => self.rng.gen_range(0..self.comp.len()),
        };
        let (p, cp) = self.take(i);
        let d = Builder::concl(n, p).dual();
        let q = self.synth(n, &d, depth, cp);
        Builder::plug(n, p, q);
        true
    }

    /// A small net to box: one principal, every other port turned into a `?`-conclusion.
    fn inner(&mut self, depth: usize) -> (Net, PortId, Vec<PortId>) {
        let saved = std::mem::take(&mut self.comp);
        let mut n = Net::new();
        let steps = self.rng.gen_range(1..=3);
        let mut done = 0;
        while done < steps {
            if self.step(&mut n, depth) {
                done += 1;
            }
        }
        let mut ports = std::mem::replace(&mut self.comp, saved);
        if ports.is_empty() {
            let (p, _) = self.b.gadget(&mut n, Symbol::One, Formula::One, &[], None);
            ports.push((p, 0));
        }
        let i = self.rng.gen_range(0..ports.len());
        let (p, _) = ports.swap_remove(i);
        let doors = self.doors(&mut n, ports);
        (n, p, doors)
    }

    /// Turns every port into a `?`-conclusion, adding derelictions where needed.
    fn doors(&mut self, n: &mut Net, ports: Vec<(PortId, usize)>) -> Vec<PortId> {
        let mut doors = Vec::new();
        for (q, _) in ports {
            let a = Builder::concl(&n, q);
            if a.unwhynot().is_some() {
                doors.push(q);
            } else {
                let (r, aux) = self.b.gadget(n, Symbol::Dereliction, Formula::whynot(a.clone()), &[a], None);
                Builder::plug(n, aux[0], q);
                doors.push(r);
            }
        }
        doors
    }

    /// A fragment with a free port concluding `f`, built by introduction rules so
    /// that plugging it against an elimination makes a redex. Its other ports join component `c`.
    fn synth(&mut self, n: &mut Net, f: &Formula, depth: usize, c: usize) -> PortId {
        if (!self.closed && self.rng.gen_bool(0.15)) || matches!(f, Formula::Bottom) {
            let (a, b) = self.b.wire(n, f.clone());
            self.comp.push((b, c));
            return a;
        }
        match f {
            Formula::One | Formula::Bottom => self.b.gadget(n, Symbol::One, Formula::One, &[], None).0,
            Formula::Tensor(a, b) | Formula::Par(a, b) => {
                let x = self.synth(n, a, depth, c);
                let y = self.synth(n, b, depth, c);
                let sym = if matches!(f, Formula::Tensor(..)) { Symbol::Tensor } else { Symbol::Par };
                self.b.fold(n, sym, &[x, y])
            }
            Formula::Bang(a) => match self.rng.gen_range(0..3) {
                0 => self.b.stub(n, f.clone()),
                _ if depth == 0 => self.b.stub(n, f.clone()),
                1 => {
                    let saved = std::mem::take(&mut self.comp);
                    let mut inner = Net::new();
                    let was = std::mem::replace(&mut self.closed, true);
                    let p = self.synth(&mut inner, a, depth - 1, 0);
                    self.closed = was;
                    let ports = std::mem::replace(&mut self.comp, saved);
                    let doors = self.doors(&mut inner, ports);
                    let (bp, bd) = self.b.boxed(n, inner, p, &doors);
                    for d in bd {
                        self.comp.push((d, c));
                    }
                    bp
                }
                _ => {
                    let x = self.synth(n, f, depth - 1, c);
                    let y = self.synth(n, f, depth - 1, c);
                    self.b.merge(n, f, &[x, y])
                }
            },
            Formula::Whynot(a) => match self.rng.gen_range(0..3) {
                0 => self.b.stub(n, f.clone()),
                1 => {
                    let x = self.synth(n, a, depth, c);
                    let (r, aux) = self.b.gadget(n, Symbol::Dereliction, f.clone(), &[(**a).clone()], None);
                    Builder::plug(n, aux[0], x);
                    r
                }
                _ if depth == 0 => self.b.stub(n, f.clone()),
                _ => {
                    let x = self.synth(n, f, depth - 1, c);
                    let y = self.synth(n, f, depth - 1, c);
                    self.b.contract(n, f, &[x, y])
                }
            },
        }
    }
}

/// A random valid net with at most `max_cells` cells at all depths, biased toward cuts.
pub fn valid_net(rng: &mut impl Rng, max_cells: usize) -> Net {
    loop {
        let mut g = Grow { rng: &mut *rng, b: Builder::new(), comp: Vec::new(), next_comp: 0, closed: false };
        let mut n = Net::new();
        let steps = g.rng.gen_range(2..=10);
        for _ in 0..steps {
            g.step(&mut n, 2);
        }
        g.cut(&mut n, 2);
        for (k, f) in n.free_ports().to_vec().into_iter().enumerate() {
            n.relabel_free(f.port, format!("p{k}"));
        }
        let size = n.deep_cell_count();
        if size == 0 || size > max_cells || !validate(&n).is_empty() {
            continue;
        }
        // redex-free draws are mostly redrawn
        if !find_redexes(&n, Policy::All).is_empty() || rng.gen_bool(0.2) {
            return n;
        }
    }
}

/// Reference types the program generator uses: `r : Unit`, `f : Unit -{r}> Unit`.
pub const PROGRAM_REFS: &str = "r : Unit\nf : Unit -{r}> Unit\n";

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ty {
    Unit,
    /// `Unit -> Unit`, any latent effect
    Fun,
    /// `(Unit -> Unit) -> Unit -> Unit`
    Fun2,
}

struct ProgGen<'a, R: Rng> {
    rng: &'a mut R,
    names: usize,
}

impl<R: Rng> ProgGen<'_, R> {
    fn fresh(&mut self, base: &str) -> String {
        self.names += 1;
        format!("{base}{}", self.names)
    }

    fn var(&mut self, env: &[(String, Ty)], t: Ty) -> Option<TermA> {
        let vs: Vec<&String> = env.iter().rev().filter(|(_, u)| *u == t).map(|(x, _)| x).collect();
        vs.choose(self.rng).map(|x| TermA::Var((*x).clone()))
    }

    /// A value of type `t`; `refs` bounds the references its body may touch.
    fn value(&mut self, t: Ty, env: &[(String, Ty)], depth: usize, refs: &[&str]) -> TermA {
        // a function variable may carry any latent effect, so it is only used where every reference is allowed
        if self.rng.gen_bool(0.3) && (t == Ty::Unit || refs.contains(&"f")) {
            if let Some(v) = self.var(env, t) {
                return v;
            }
        }
        match t {
            Ty::Unit => TermA::Star,
            Ty::Fun => {
                let x = self.fresh("x");
                let mut env = env.to_vec();
                env.push((x.clone(), Ty::Unit));
                TermA::lam(&x, self.term(Ty::Unit, &env, depth.saturating_sub(1), refs))
            }
            Ty::Fun2 => {
                let g = self.fresh("g");
                let y = self.fresh("y");
                let mut env = env.to_vec();
                env.push((g.clone(), Ty::Fun));
                env.push((y.clone(), Ty::Unit));
                TermA::lam(&g, TermA::lam(&y, self.term(Ty::Unit, &env, depth.saturating_sub(1), refs)))
            }
        }
    }

    /// A term of type `t`. In an application whose function part is not a
    /// value, the argument does not mention references the function part does.
    fn term(&mut self, t: Ty, env: &[(String, Ty)], depth: usize, refs: &[&str]) -> TermA {
        if depth == 0 {
            return self.value(t, env, 0, refs);
        }
        let choice = self.rng.gen_range(0..8);
        match (t, choice) {
            (Ty::Unit, 0) if refs.contains(&"r") => TermA::get("r"),
            (Ty::Unit, 1) if refs.contains(&"r") => TermA::set("r", TermA::Star),
            (Ty::Unit, 2) if refs.contains(&"f") => {
                let v = self.value(Ty::Fun, env, depth - 1, &["r"]);
                TermA::set("f", v)
            }
            (Ty::Unit, 3) if refs.contains(&"f") => TermA::app(TermA::get("f"), self.value(Ty::Unit, env, 0, refs)),
            (Ty::Fun, 0) if refs.contains(&"f") => TermA::get("f"),
            (_, 4 | 5) => {
                let f = self.term(Ty::Fun, env, depth - 1, refs);
                self.apply(f, Ty::Unit, t, env, depth, refs)
            }
            (Ty::Unit | Ty::Fun, 6) => {
                let f = self.term(Ty::Fun2, env, depth - 1, refs);
                let g = self.value(Ty::Fun, env, depth - 1, refs);
                let fg = TermA::app(f, g);
                if t == Ty::Fun {
                    fg
                } else {
                    self.apply(fg, Ty::Unit, t, env, depth, refs)
                }
            }
            _ => self.value(t, env, depth, refs),
        }
    }

    /// `f a` with `a : arg`; `f` must return `t`, else the result is thunked.
    fn apply(&mut self, f: TermA, arg: Ty, t: Ty, env: &[(String, Ty)], depth: usize, refs: &[&str]) -> TermA {
        let a = if f.is_value() {
            self.term(arg, env, depth - 1, refs)
        } else {
            let used = f.references();
            let allowed: Vec<&str> = refs.iter().copied().filter(|r| !used.contains(*r)).collect();
            self.term(arg, env, depth - 1, &allowed)
        };
        let fa = TermA::app(f, a);
        match t {
            Ty::Unit => fa,
            _ => {
                let z = self.fresh("z");
                let k = self.value(t, env, 0, refs);
                TermA::app(TermA::lam(&z, k), fa)
            }
        }
    }
}

/// A closed well-typed program: one to three threads plus stores, term depth at most 5,
/// references `r` and `f` typed by [`PROGRAM_REFS`].
pub fn program(rng: &mut impl Rng) -> TermA {
    let mut g = ProgGen { rng, names: 0 };
    let mut threads = Vec::new();
    for _ in 0..g.rng.gen_range(1..=2) {
        let t = if g.rng.gen_bool(0.7) { Ty::Unit } else { Ty::Fun };
        let d = g.rng.gen_range(1..=4);
        threads.push(g.term(t, &[], d, &["r", "f"]));
    }
    for _ in 0..g.rng.gen_range(0..=2) {
        if g.rng.gen_bool(0.5) {
            threads.push(TermA::store("r", TermA::Star));
        } else {
            let v = g.value(Ty::Fun, &[], 2, &["r"]);
            threads.push(TermA::store("f", v));
        }
    }
    TermA::par_all(threads).unwrap()
}
