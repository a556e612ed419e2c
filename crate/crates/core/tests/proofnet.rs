use proptest::prelude::*;
use routenet::proofnet::{
    absorb_neutral, canonical_equal, canonical_equal_nets, canonical_key, canonicalize, parse, serialize, serialize_net, to_dot,
    validate, Formula, Fresh, Net, NetSum, Symbol, Violation,
};
use routenet::proofnet::parse_net;
use routenet::verify::{case_rng, gen};

fn f(s: &str) -> Formula {
    s.parse().unwrap()
}

fn free_wire(ty: &str) -> Net {
    let mut fr = Fresh::new();
    let mut n = Net::new();
    let a = n.add_free(&mut fr, "a");
    let b = n.add_free(&mut fr, "b");
    n.connect(a, b, f(ty));
    n
}

/// Contraction tree over `k` leaves shaped as a left or right comb, leaves labelled x0.. and root r.
fn comb(k: usize, left: bool, sym: Symbol, ty: &str) -> Net {
    let t = f(ty);
    let mut fr = Fresh::new();
    let mut n = Net::new();
    let r = n.add_free(&mut fr, "r");
    let leaves: Vec<_> = (0..k).map(|i| n.add_free(&mut fr, format!("x{i}"))).collect();
    // open: port whose wire still needs a subtree, read type t from the tree side toward it
    let mut open = r;
    let mut rest = leaves.clone();
    while rest.len() > 1 {
        let c = n.add_cell(&mut fr, sym, 2, None);
        let cell = n.cell(c).unwrap().clone();
        n.connect(cell.principal, open, t.clone());
        let (sub, leaf) = if left {
            (cell.aux[0], rest.pop().unwrap())
        } else {
            (cell.aux[1], rest.remove(0))
        };
        let other = if left { cell.aux[1] } else { cell.aux[0] };
        n.connect(leaf, other, t.clone());
        open = sub;
    }
    n.connect(rest[0], open, t.dual().dual());
    n
}

#[test]
fn free_wire_is_valid() {
    assert!(validate(&free_wire("!1")).is_empty());
}

#[test]
fn combs_validate_and_are_equal() {
    let l = comb(3, true, Symbol::Contraction, "?bot");
    let r = comb(3, false, Symbol::Contraction, "?bot");
    assert!(validate(&l).is_empty(), "{:?}", validate(&l));
    assert!(validate(&r).is_empty(), "{:?}", validate(&r));
    assert!(canonical_equal_nets(&l, &r));
}

#[test]
fn contraction_differs_from_cocontraction() {
    let c = comb(2, true, Symbol::Contraction, "?bot");
    let k = comb(2, true, Symbol::Cocontraction, "!1");
    assert!(!canonical_equal_nets(&c, &k));
}

#[test]
fn weakening_leaf_is_neutral() {
    let t = f("?bot");
    let mut fr = Fresh::new();
    let mut n = Net::new();
    let a = n.add_free(&mut fr, "a");
    let b = n.add_free(&mut fr, "b");
    let c = n.add_cell(&mut fr, Symbol::Contraction, 2, None);
    let w = n.add_cell(&mut fr, Symbol::Weakening, 0, None);
    let (cp, ca) = {
        let c = n.cell(c).unwrap();
        (c.principal, c.aux.clone())
    };
    let wp = n.cell(w).unwrap().principal;
    n.connect(cp, a, t.clone());
    n.connect(ca[0], b, t.dual());
    n.connect(wp, ca[1], t.clone());
    assert!(validate(&n).is_empty(), "{:?}", validate(&n));
    let mut bare = Net::new();
    let mut fr = Fresh::new();
    let a = bare.add_free(&mut fr, "a");
    let b = bare.add_free(&mut fr, "b");
    bare.connect(b, a, t);
    assert!(canonical_equal_nets(&n, &bare));
}

#[test]
fn contraction_with_non_whynot_aux_is_type_mismatch() {
    let mut fr = Fresh::new();
    let mut n = Net::new();
    let r = n.add_free(&mut fr, "r");
    let x = n.add_free(&mut fr, "x");
    let y = n.add_free(&mut fr, "y");
    let c = n.add_cell(&mut fr, Symbol::Contraction, 2, None);
    let c = n.cell(c).unwrap().clone();
    n.connect(c.principal, r, f("?bot"));
    n.connect(x, c.aux[0], f("bot"));
    n.connect(y, c.aux[1], f("bot"));
    assert!(validate(&n).iter().any(|v| matches!(v, Violation::TypeMismatch { .. })));
}

#[test]
fn unary_cocontraction_is_rejected() {
    let mut fr = Fresh::new();
    let mut n = Net::new();
    let r = n.add_free(&mut fr, "r");
    let x = n.add_free(&mut fr, "x");
    let c = n.add_cell(&mut fr, Symbol::Cocontraction, 1, None);
    let c = n.cell(c).unwrap().clone();
    n.connect(c.principal, r, f("!1"));
    n.connect(x, c.aux[0], f("!1"));
    assert!(validate(&n).iter().any(|v| matches!(v, Violation::ArityMismatch { .. })));
}

fn one_box(floating: bool) -> Net {
    let mut fr = Fresh::new();
    let mut inner = Net::new();
    let p = inner.add_free(&mut fr, "p");
    let d = inner.add_free(&mut fr, "d1");
    if floating {
        inner.connect(d, p, f("!1"));
    } else {
        let one = inner.add_cell(&mut fr, Symbol::One, 0, None);
        let op = inner.cell(one).unwrap().principal;
        inner.connect(op, p, f("1"));
        let w = inner.add_cell(&mut fr, Symbol::Weakening, 0, None);
        let wp = inner.cell(w).unwrap().principal;
        inner.connect(wp, d, f("?bot"));
    }
    let mut n = Net::new();
    fr.bump_above(&inner);
    let b = n.add_cell(&mut fr, Symbol::Box, 1, Some(inner));
    let b = n.cell(b).unwrap().clone();
    let out = n.add_free(&mut fr, "out");
    let door = n.add_free(&mut fr, "door");
    n.connect(b.principal, out, if floating { f("!?bot") } else { f("!1") });
    n.connect(door, b.aux[0], f("!1"));
    n
}

#[test]
fn box_checks() {
    let good = one_box(false);
    assert!(validate(&good).is_empty(), "{:?}", validate(&good));
    let bad = one_box(true);
    assert!(validate(&bad).iter().any(|v| matches!(v, Violation::BoxFloatingWire { .. })));
}

#[test]
fn json_empty_sum() {
    assert_eq!(serialize(&NetSum::zero()), r#"{"sum":[]}"#);
}

#[test]
fn json_round_trip_is_bit_exact() {
    for n in [free_wire("!1"), comb(4, true, Symbol::Cocontraction, "!(1*1)"), one_box(false)] {
        let s = serialize_net(&n);
        let back = parse(&s).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(serialize(&back), s);
        assert!(canonical_equal(&back, &NetSum::single(n)));
    }
}

#[test]
fn json_rejects_duplicate_ids_and_garbage() {
    let dup = r#"{"sum":[{"free":[{"port":0,"label":"a"},{"port":0,"label":"b"}],"cells":[],"wires":[]}]}"#;
    assert!(parse(dup).unwrap_err().reason.contains("duplicate"));
    let e = parse(r#"{"sum":[}"#).unwrap_err();
    assert_eq!(e.offset, 8);
}

#[test]
fn canonicalize_is_stable() {
    let n = comb(4, false, Symbol::Contraction, "?bot");
    let c = canonicalize(&n);
    assert!(validate(&c).is_empty(), "{:?}", validate(&c));
    assert_eq!(canonical_key(&c), canonical_key(&n));
    assert_eq!(serialize_net(&canonicalize(&c)), serialize_net(&c));
}

#[test]
fn dot_output() {
    let d = to_dot(&free_wire("1"));
    assert_eq!(d.matches("->").count(), 1);
    assert!(!d.contains("\"c"));
    let b = to_dot(&one_box(false));
    assert!(b.contains("subgraph \"cluster_"));
}

/// A net, a renumbered copy, a copy with neutral cells absorbed, and an unrelated net.
fn sample(seed: u64) -> Vec<Net> {
    let mut rng = case_rng(seed, 0);
    let n = gen::valid_net(&mut rng, 30);
    let (copy, _) = n.deep_copy(&mut Fresh::above(&n));
    let mut absorbed = n.clone();
    absorb_neutral(&mut absorbed);
    vec![n, copy, absorbed, gen::valid_net(&mut rng, 30)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_equality_is_an_equivalence(seed in any::<u64>()) {
        let nets = sample(seed);
        let eq = |a: &Net, b: &Net| canonical_equal_nets(a, b);
        for a in &nets {
            prop_assert!(eq(a, a));
            for b in &nets {
                prop_assert_eq!(eq(a, b), eq(b, a));
                for c in &nets {
                    prop_assert!(!(eq(a, b) && eq(b, c)) || eq(a, c));
                }
            }
        }
        prop_assert!(eq(&nets[0], &nets[1]) && eq(&nets[0], &nets[2]));
    }

    #[test]
    fn dual_is_an_involution(seed in any::<u64>()) {
        let f = gen::formula(&mut case_rng(seed, 0), 6);
        prop_assert_eq!(f.dual().dual(), f.clone());
        prop_assert_ne!(f.dual(), f);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let mut rng = case_rng(seed, 0);
        let n = if seed % 2 == 0 { gen::valid_net(&mut rng, 15) } else { gen::routing_net(&mut rng, 15) };
        let text = serialize_net(&n);
        let back = parse_net(&text).unwrap();
        prop_assert_eq!(serialize_net(&back), text);
        prop_assert_eq!(back, n);
    }

    #[test]
    fn canonicalize_is_idempotent(seed in any::<u64>()) {
        let n = gen::valid_net(&mut case_rng(seed, 0), 20);
        let c = canonicalize(&n);
        prop_assert!(validate(&c).is_empty());
        prop_assert_eq!(serialize_net(&canonicalize(&c)), serialize_net(&c));
        prop_assert!(canonical_equal_nets(&c, &n));
    }
}
