use proptest::prelude::*;
use routenet::proofnet::{canonical_equal, canonical_equal_nets, validate, Cell, Formula, Fresh, Net, NetSum, PortId, Symbol};
use routenet::rewrite::{
    apply, find_redexes, normalize, normalize_with, reduction_graph, Policy, RewriteError, Rule, Strategy,
};
use routenet::verify::{case_rng, gen};

fn f(s: &str) -> Formula {
    s.parse().unwrap()
}

struct B {
    n: Net,
    fr: Fresh,
}

impl B {
    fn new() -> B {
        B {
            n: Net::new(),
            fr: Fresh::new(),
        }
    }
    /// Builder for a box body drawing ids from the same supply.
    fn child(&self) -> B {
        B {
            n: Net::new(),
            fr: self.fr.clone(),
        }
    }
    fn free(&mut self, l: &str) -> PortId {
        self.n.add_free(&mut self.fr, l)
    }
    fn cell(&mut self, s: Symbol, k: usize) -> Cell {
        let id = self.n.add_cell(&mut self.fr, s, k, None);
        self.n.cell(id).unwrap().clone()
    }
    fn boxed(&mut self, inner: Net, doors: usize) -> Cell {
        self.fr.bump_above(&inner);
        let id = self.n.add_cell(&mut self.fr, Symbol::Box, doors, Some(inner));
        self.n.cell(id).unwrap().clone()
    }
    fn wire(&mut self, a: PortId, b: PortId, ty: &str) {
        self.n.connect(a, b, f(ty));
    }
    fn done(self) -> Net {
        let v = validate(&self.n);
        assert!(v.is_empty(), "{v:?}");
        self.n
    }
}

/// Closed box holding a one cell: principal !1.
fn one_box(b: &mut B) -> Cell {
    let mut inner = b.child();
    let p = inner.free("p");
    let o = inner.cell(Symbol::One, 0);
    inner.wire(o.principal, p, "1");
    let inner = inner.done();
    b.boxed(inner, 0)
}

#[test]
fn m_redex_at_surface() {
    let mut b = B::new();
    let (x, y, u, v) = (b.free("x"), b.free("y"), b.free("u"), b.free("v"));
    let t = b.cell(Symbol::Tensor, 2);
    let p = b.cell(Symbol::Par, 2);
    b.wire(x, t.aux[0], "1");
    b.wire(y, t.aux[1], "1");
    b.wire(u, p.aux[0], "bot");
    b.wire(v, p.aux[1], "bot");
    b.wire(t.principal, p.principal, "(1*1)");
    let n = b.done();
    let rs = find_redexes(&n, Policy::SurfaceOnly);
    assert_eq!(rs.len(), 1);
    assert_eq!(rs[0].rule, Rule::M);
    let out = apply(&n, &rs[0]).unwrap();
    let r = out.nets().next().unwrap();
    assert!(validate(r).is_empty());
    assert_eq!(r.cell_count(), 0);
    assert_eq!(r.peer(r.free_port("x").unwrap()), r.free_port("u"));
}

#[test]
fn no_d_redex_against_box_with_door() {
    let mut b = B::new();
    let mut inner = b.child();
    let p = inner.free("p");
    let d = inner.free("d1");
    let der = inner.cell(Symbol::Dereliction, 1);
    inner.wire(d, der.principal, "!1");
    inner.wire(der.aux[0], p, "1");
    let inner = inner.done();
    let bx = b.boxed(inner, 1);
    let (x, y, z) = (b.free("x"), b.free("y"), b.free("z"));
    let c = b.cell(Symbol::Contraction, 2);
    b.wire(c.principal, bx.principal, "?bot");
    b.wire(x, c.aux[0], "?bot");
    b.wire(y, c.aux[1], "?bot");
    b.wire(z, bx.aux[0], "!1");
    let n = b.done();
    assert!(find_redexes(&n, Policy::All).is_empty());
}

#[test]
fn inner_e_redex_is_filtered_by_policy() {
    let mut b = B::new();
    // box whose body is der facing a closed one-box, exposing the der output
    let mut inner = b.child();
    let p = inner.free("p");
    let ob = one_box(&mut inner);
    let der = inner.cell(Symbol::Dereliction, 1);
    inner.wire(der.principal, ob.principal, "?bot");
    inner.wire(der.aux[0], p, "1");
    let inner = inner.done();
    let bx = b.boxed(inner, 0);
    let out = b.free("out");
    b.wire(bx.principal, out, "!1");
    let n = b.done();
    assert!(find_redexes(&n, Policy::SurfaceOnly).is_empty());
    let rs = find_redexes(&n, Policy::AnyDepthEEr);
    assert_eq!(rs.len(), 1);
    assert_eq!((rs[0].rule, rs[0].depth), (Rule::E, 1));
    let nf = normalize(&NetSum::single(n), 100).unwrap();
    let r = nf.nets().next().unwrap();
    assert!(validate(r).is_empty());
    assert_eq!(r.deep_cell_count(), 2);
}

#[test]
fn nd_gives_two_summands() {
    let mut b = B::new();
    let b1 = one_box(&mut b);
    let b2 = one_box(&mut b);
    let k = b.cell(Symbol::Cocontraction, 2);
    let d = b.cell(Symbol::Dereliction, 1);
    let out = b.free("out");
    b.wire(b1.principal, k.aux[0], "!1");
    b.wire(b2.principal, k.aux[1], "!1");
    b.wire(k.principal, d.principal, "!1");
    b.wire(out, d.aux[0], "bot");
    let n = b.done();
    let rs = find_redexes(&n, Policy::SurfaceOnly);
    assert_eq!(rs[0].rule, Rule::Nd);
    let raw = routenet::rewrite::apply_raw(&n, &rs[0]).unwrap();
    assert_eq!(raw.len(), 2);
    for r in &raw {
        assert!(validate(r).is_empty());
        let syms: Vec<Symbol> = r.cells().map(|c| c.symbol).collect();
        assert!(syms.contains(&Symbol::Weakening) && syms.contains(&Symbol::Dereliction));
    }
    // the two branches are symmetric and collapse in a set
    assert_eq!(apply(&n, &rs[0]).unwrap().len(), 1);
}

#[test]
fn s1_and_zero_wd() {
    let mut b = B::new();
    let (x, y) = (b.free("x"), b.free("y"));
    let c = b.cell(Symbol::Contraction, 2);
    let k = b.cell(Symbol::Coweakening, 0);
    b.wire(k.principal, c.principal, "!1");
    b.wire(x, c.aux[0], "?bot");
    b.wire(y, c.aux[1], "?bot");
    let n = b.done();
    let out = apply(&n, &find_redexes(&n, Policy::All)[0]).unwrap();
    let r = out.nets().next().unwrap();
    assert_eq!(r.cells().filter(|c| c.symbol == Symbol::Coweakening).count(), 2);
    assert!(validate(r).is_empty());

    let mut b = B::new();
    let out = b.free("out");
    let d = b.cell(Symbol::Dereliction, 1);
    let k = b.cell(Symbol::Coweakening, 0);
    b.wire(k.principal, d.principal, "!1");
    b.wire(out, d.aux[0], "bot");
    let n = b.done();
    let rs = find_redexes(&n, Policy::All);
    assert_eq!(rs[0].rule, Rule::ZeroWd);
    assert!(apply(&n, &rs[0]).unwrap().is_zero());
}

#[test]
fn der_on_cocontracted_coweakenings_is_zero() {
    let mut b = B::new();
    let out = b.free("out");
    let d = b.cell(Symbol::Dereliction, 1);
    let k = b.cell(Symbol::Cocontraction, 2);
    let w1 = b.cell(Symbol::Coweakening, 0);
    let w2 = b.cell(Symbol::Coweakening, 0);
    b.wire(w1.principal, k.aux[0], "!1");
    b.wire(w2.principal, k.aux[1], "!1");
    b.wire(k.principal, d.principal, "!1");
    b.wire(out, d.aux[0], "bot");
    let n = b.done();
    assert!(normalize(&NetSum::single(n), 100).unwrap().is_zero());
}

fn bialgebra_input() -> Net {
    let mut b = B::new();
    let (i1, i2, o1, o2) = (b.free("i1"), b.free("i2"), b.free("o1"), b.free("o2"));
    let k = b.cell(Symbol::Cocontraction, 2);
    let c = b.cell(Symbol::Contraction, 2);
    b.wire(i1, k.aux[0], "!1");
    b.wire(i2, k.aux[1], "!1");
    b.wire(k.principal, c.principal, "!1");
    b.wire(c.aux[0], o1, "!1");
    b.wire(c.aux[1], o2, "!1");
    b.done()
}

#[test]
fn bialgebra_normal_form() {
    let n = bialgebra_input();
    let nf = normalize(&NetSum::single(n), 100).unwrap();
    assert_eq!(nf.len(), 1);
    let r = nf.nets().next().unwrap();
    assert!(validate(r).is_empty());
    assert_eq!(r.cell_count(), 4);
    assert!(find_redexes(r, Policy::All).is_empty());
    // crosswise: 4 wires between the new cells
    let internal = r
        .wires()
        .iter()
        .filter(|w| r.owner(w.a).is_some() && r.owner(w.b).is_some())
        .count();
    assert_eq!(internal, 4);
}

#[test]
fn trace_log_lines() {
    let mut log = Vec::new();
    normalize_with(&NetSum::single(bialgebra_input()), Strategy::default(), Some(&mut log)).unwrap();
    assert_eq!(log.len(), 1);
    assert!(log[0].starts_with("0 ba "), "{}", log[0]);
    assert!(log[0].ends_with("-> 1 summands"));
}

#[test]
fn budget_exhaustion_returns_partial() {
    let e = normalize(&NetSum::single(bialgebra_input()), 0).unwrap_err();
    match e {
        RewriteError::BudgetExhausted { partial, .. } => assert_eq!(partial.len(), 1),
        e => panic!("{e:?}"),
    }
}

#[test]
fn graph_of_normal_net_is_a_point() {
    let mut b = B::new();
    let (x, y) = (b.free("x"), b.free("y"));
    b.wire(x, y, "1");
    let g = reduction_graph(&b.done(), 100);
    assert_eq!((g.nodes.len(), g.edges.len()), (1, 0));
}

#[test]
fn two_disjoint_m_redexes_form_a_diamond() {
    let mut b = B::new();
    for k in 0..2 {
        let x = b.free(&format!("x{k}"));
        let y = b.free(&format!("y{k}"));
        let u = b.free(&format!("u{k}"));
        let v = b.free(&format!("v{k}"));
        let t = b.cell(Symbol::Tensor, 2);
        let p = b.cell(Symbol::Par, 2);
        b.wire(x, t.aux[0], "1");
        b.wire(y, t.aux[1], "1");
        b.wire(u, p.aux[0], "bot");
        b.wire(v, p.aux[1], "bot");
        b.wire(t.principal, p.principal, "(1*1)");
    }
    let g = reduction_graph(&b.done(), 100);
    assert_eq!(g.nodes.len(), 4);
    assert_eq!(g.edges.len(), 4);
    assert_eq!(g.sinks().len(), 1);
    assert!(!g.has_cycle());
}

#[test]
fn d_duplicates_and_c_moves_boxes() {
    // contraction on a closed box, both copies land on the outputs
    let mut b = B::new();
    let (x, y) = (b.free("x"), b.free("y"));
    let ob = one_box(&mut b);
    let c = b.cell(Symbol::Contraction, 2);
    b.wire(ob.principal, c.principal, "!1");
    b.wire(c.aux[0], x, "!1");
    b.wire(c.aux[1], y, "!1");
    let n = b.done();
    let nf = normalize(&NetSum::single(n), 100).unwrap();
    let r = nf.nets().next().unwrap();
    assert!(validate(r).is_empty());
    assert_eq!(r.cells().filter(|c| c.symbol == Symbol::Box).count(), 2);

    // box with one door fed by a closed box: c pulls it inside
    let mut b = B::new();
    let mut inner = b.child();
    let p = inner.free("p");
    let d = inner.free("d1");
    let der = inner.cell(Symbol::Dereliction, 1);
    inner.wire(d, der.principal, "!1");
    inner.wire(der.aux[0], p, "1");
    let bx = b.boxed(inner.done(), 1);
    let ob = one_box(&mut b);
    let out = b.free("out");
    b.wire(ob.principal, bx.aux[0], "!1");
    b.wire(bx.principal, out, "!1");
    let n = b.done();
    let rs = find_redexes(&n, Policy::All);
    assert_eq!(rs[0].rule, Rule::C);
    let after = apply(&n, &rs[0]).unwrap();
    let r = after.nets().next().unwrap();
    assert!(validate(r).is_empty(), "{:?}", validate(r));
    assert_eq!(r.cell_count(), 1);
    // the moved box now meets the dereliction inside: e fires at depth 1
    let nf = normalize(&after, 100).unwrap();
    let r = nf.nets().next().unwrap();
    let mut b = B::new();
    let mut inner = b.child();
    let p = inner.free("p");
    let o = inner.cell(Symbol::One, 0);
    inner.wire(o.principal, p, "1");
    let bx = b.boxed(inner.done(), 0);
    let out = b.free("out");
    b.wire(bx.principal, out, "!1");
    assert!(canonical_equal_nets(r, &b.done()));
}

fn interface(n: &Net) -> Vec<(String, Formula)> {
    let mut v: Vec<(String, Formula)> =
        n.free_ports().iter().map(|f| (f.label.clone(), n.free_type(f.port).unwrap().clone())).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steps_keep_validity_and_interface(seed in any::<u64>()) {
        let n = gen::valid_net(&mut case_rng(seed, 0), 12);
        let want = interface(&n);
        for r in find_redexes(&n, Policy::All) {
            for m in apply(&n, &r).unwrap().nets() {
                prop_assert!(validate(m).is_empty(), "{} gives {:?}", r, validate(m));
                prop_assert_eq!(&interface(m), &want, "step {}", r);
            }
        }
    }

    #[test]
    fn reversed_order_reaches_the_same_normal_form(seed in any::<u64>()) {
        let n = NetSum::single(gen::valid_net(&mut case_rng(seed, 1), 12));
        let forward = normalize(&n, 5000);
        let backward = normalize_with(&n, Strategy { budget: 5000, reversed: true }, None);
        if let (Ok(a), Ok(b)) = (forward, backward) {
            prop_assert!(canonical_equal(&a, &b));
        }
    }

    #[test]
    fn graphs_have_one_sink(seed in any::<u64>()) {
        let g = reduction_graph(&gen::valid_net(&mut case_rng(seed, 2), 10), 2000);
        prop_assume!(!g.truncated);
        let sinks = g.sinks();
        prop_assert!(sinks.len() <= 1);
        if sinks.len() == 1 {
            prop_assert!(!g.has_cycle());
        }
    }
}
