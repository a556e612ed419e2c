use std::collections::BTreeMap;

use proptest::prelude::*;
use routenet::multirel::Multirelation;
use routenet::paths::{build_graph, check_acyclic, count_paths, count_paths_dfs, PathsError};
use routenet::proofnet::{canonical_equal_nets, validate, Formula, Fresh, Net, NetSum, Symbol};
use routenet::rewrite::{find_redexes, normalize, Policy};
use routenet::routing::*;

const BUDGET: usize = 10_000;

fn rel(rows: &[&[u64]]) -> Multirelation {
    let ins: Vec<String> = (1..=rows.len()).map(|k| k.to_string()).collect();
    let outs: Vec<String> = (1..=rows.first().map_or(0, |r| r.len())).map(|k| k.to_string()).collect();
    let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
    Multirelation::from_rows(&ins, &outs, &rows).unwrap()
}

fn area(r: Multirelation) -> Net {
    build_area(&RoutingArea::new(r))
}

/// Row-major dense entries over numbered labels.
fn dense(r: &Multirelation, n: usize, m: usize) -> Vec<Vec<u64>> {
    (1..=n)
        .map(|i| (1..=m).map(|o| r.get(&i.to_string(), &o.to_string())).collect())
        .collect()
}

#[test]
fn degenerate_areas() {
    let z = area(rel(&[&[0]]));
    let syms: Vec<Symbol> = z.cells().map(|c| c.symbol).collect();
    assert_eq!(syms.len(), 2);
    assert!(syms.contains(&Symbol::Weakening) && syms.contains(&Symbol::Coweakening));
    let w = area(rel(&[&[1]]));
    assert_eq!(w.cell_count(), 0);
    assert_eq!(w.wires().len(), 1);
    assert_eq!(read_area(&w).unwrap().rel, rel(&[&[1]]));
}

#[test]
fn built_areas_are_normal_routing_nets() {
    for r in [gamma_rel(), delta_rel(), rel(&[&[2, 0, 1]]), rel(&[&[3, 1], &[0, 2]])] {
        let n = area(r.clone());
        assert!(validate(&n).is_empty());
        assert!(is_routing_net(&n));
        assert!(find_redexes(&n, Policy::All).is_empty());
        assert_eq!(read_area(&n).unwrap().rel, r);
        assert_eq!(path_semantics(&n).unwrap(), r);
    }
}

fn two_cell_cycle() -> Net {
    // cocontraction output into a contraction whose output feeds the cocontraction's other input
    let t = Formula::bang(Formula::One);
    let mut fr = Fresh::new();
    let mut n = Net::new();
    let i = n.add_free(&mut fr, "in:1");
    let o = n.add_free(&mut fr, "out:1");
    let k = n.add_cell(&mut fr, Symbol::Cocontraction, 2, None);
    let c = n.add_cell(&mut fr, Symbol::Contraction, 2, None);
    let (k, c) = (n.cell(k).unwrap().clone(), n.cell(c).unwrap().clone());
    n.connect(i, k.aux[0], t.clone());
    n.connect(k.principal, c.principal, t.clone());
    n.connect(c.aux[0], k.aux[1], t.clone());
    n.connect(c.aux[1], o, t);
    n
}

#[test]
fn recognition() {
    let c = two_cell_cycle();
    assert!(validate(&c).is_empty());
    assert_eq!(check_acyclic(&c), Ok(false));
    assert!(!is_routing_net(&c));
    assert_eq!(check_acyclic(&Net::new()), Ok(true));

    let mut fr = Fresh::new();
    let mut t = Net::new();
    let (x, y, z) = (t.add_free(&mut fr, "x"), t.add_free(&mut fr, "y"), t.add_free(&mut fr, "z"));
    let tc = t.add_cell(&mut fr, Symbol::Tensor, 2, None);
    let tc = t.cell(tc).unwrap().clone();
    t.connect(x, tc.aux[0], Formula::bang(Formula::One));
    t.connect(y, tc.aux[1], Formula::bang(Formula::One));
    t.connect(tc.principal, z, "(!1*!1)".parse().unwrap());
    assert!(!is_routing_net(&t));
    assert_eq!(build_graph(&routenet::routing::unit_payload()), Err(PathsError::HasBoxes));
}

fn lone(sym: Symbol) -> Net {
    let t = Formula::bang(Formula::One);
    let mut fr = Fresh::new();
    let mut n = Net::new();
    let id = n.add_cell(&mut fr, sym, 2, None);
    let c = n.cell(id).unwrap().clone();
    if sym == Symbol::Contraction {
        let i = n.add_free(&mut fr, "in:1");
        let o1 = n.add_free(&mut fr, "out:1");
        let o2 = n.add_free(&mut fr, "out:2");
        n.connect(i, c.principal, t.clone());
        n.connect(c.aux[0], o1, t.clone());
        n.connect(c.aux[1], o2, t);
    } else {
        let i1 = n.add_free(&mut fr, "in:1");
        let i2 = n.add_free(&mut fr, "in:2");
        let o = n.add_free(&mut fr, "out:1");
        n.connect(i1, c.aux[0], t.clone());
        n.connect(i2, c.aux[1], t.clone());
        n.connect(c.principal, o, t);
    }
    n
}

#[test]
fn single_cell_semantics() {
    assert_eq!(semantics(&lone(Symbol::Contraction), BUDGET).unwrap(), rel(&[&[1, 1]]));
    assert_eq!(semantics(&lone(Symbol::Cocontraction), BUDGET).unwrap(), rel(&[&[1], &[1]]));
}

#[test]
fn bialgebra_reads_as_all_ones() {
    let n = compose_areas(&lone(Symbol::Cocontraction), &["1"], &lone(Symbol::Contraction), &["1"], BUDGET).unwrap();
    let r = read_area(&n).unwrap().rel;
    assert_eq!(r.to_rows(), vec![vec![1, 1], vec![1, 1]]);
    assert_eq!(path_semantics(&n).unwrap(), r);
}

#[test]
fn path_counts_on_areas() {
    let n = area(rel(&[&[2]]));
    let (i, o) = (inputs(&n)[0].0, outputs(&n)[0].0);
    assert_eq!(count_paths(&n, i, o), Ok(2));
    let g = gamma();
    for (i, il) in inputs(&g) {
        for (o, ol) in outputs(&g) {
            let want = u64::from(strip_label(&il) != strip_label(&ol));
            assert_eq!(count_paths(&g, i, o), Ok(want));
            assert_eq!(count_paths_dfs(&g, i, o), Ok(want));
        }
    }
}

#[test]
fn trace_examples() {
    let t = trace_net(&gamma(), "1", "1", BUDGET).unwrap();
    let r = read_area(&t).unwrap().rel;
    let want = Multirelation::from_rows(&["2", "3"], &["2", "3"], &[vec![1, 2], vec![2, 1]]).unwrap();
    assert_eq!(r, want);
    let e = trace_net(&area(rel(&[&[0]])), "1", "1", BUDGET).unwrap();
    assert_eq!(e.cell_count(), 0);
    assert!(e.free_ports().is_empty());
    assert!(matches!(
        trace_net(&area(rel(&[&[1]])), "1", "1", BUDGET),
        Err(RoutingError::CycleRisk { .. })
    ));
}

#[test]
fn transit_examples() {
    let p = unit_payload();
    let t = transit(&area(rel(&[&[2, 0, 1]])), "1", &p, BUDGET).unwrap();
    let want: BTreeMap<String, u64> = [("1", 2), ("2", 0), ("3", 1)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
    assert_eq!(t.counts, want);
    assert!(canonical_equal_nets(&t.residual, &area(rel(&[&[2, 0, 1]]))));
    let t = transit(&area(rel(&[&[0]])), "1", &p, BUDGET).unwrap();
    assert_eq!(t.counts["1"], 0);
    let t = transit(&gamma(), "1", &p, BUDGET).unwrap();
    assert_eq!((t.counts["1"], t.counts["2"], t.counts["3"]), (0, 1, 1));
    assert!(canonical_equal_nets(&t.residual, &gamma()));
}

#[test]
fn gamma_and_delta() {
    assert_eq!(semantics(&gamma(), BUDGET).unwrap(), Multirelation::communication(3));
    let d = semantics(&delta(), BUDGET).unwrap();
    assert_eq!((d.get("3", "1"), d.get("3", "2"), d.get("1", "3"), d.get("3", "4")), (0, 0, 1, 1));
}

#[test]
fn juxtaposition_is_block_diagonal() {
    let a = area(Multirelation::communication(2));
    let j = juxtapose(&a, &a);
    let want = Multirelation::communication(2).coproduct(&Multirelation::communication(2));
    assert_eq!(path_semantics(&j).unwrap(), want);
    assert_eq!(semantics(&j, BUDGET).unwrap(), want);
}

fn matrix(n: usize, m: usize, max: u64) -> impl Strategy<Value = Vec<Vec<u64>>> {
    prop::collection::vec(prop::collection::vec(0..=max, m), n)
}

fn from_dense(rows: &[Vec<u64>]) -> Multirelation {
    let refs: Vec<&[u64]> = rows.iter().map(|r| r.as_slice()).collect();
    rel(&refs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn read_after_build_is_identity(rows in (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| matrix(n, m, 3))) {
        let r = from_dense(&rows);
        let n = area(r.clone());
        prop_assert_eq!(&read_area(&n).unwrap().rel, &r);
        prop_assert_eq!(&path_semantics(&n).unwrap(), &r);
    }

    #[test]
    fn full_composition_is_matrix_product(a in matrix(3, 3, 2), b in matrix(3, 3, 2)) {
        let n = compose_areas(&area(from_dense(&a)), &["1", "2", "3"], &area(from_dense(&b)), &["1", "2", "3"], BUDGET).unwrap();
        let got = read_area(&n).unwrap().rel;
        // oracle: schoolbook product
        for i in 0..3 {
            for k in 0..3 {
                let want: u64 = (0..3).map(|j| a[i][j] * b[j][k]).sum();
                prop_assert_eq!(got.get(&format!("L.{}", i + 1), &format!("R.{}", k + 1)), want);
            }
        }
    }

    #[test]
    fn trace_matches_feedback_oracle(rows in matrix(3, 3, 2), i in 0usize..3, o in 0usize..3) {
        let mut rows = rows;
        rows[i][o] = 0;
        let n = trace_net(&area(from_dense(&rows)), &(i + 1).to_string(), &(o + 1).to_string(), BUDGET).unwrap();
        let got = read_area(&n).unwrap().rel;
        for x in (0..3).filter(|x| *x != i) {
            for y in (0..3).filter(|y| *y != o) {
                let want = rows[x][y] + rows[x][o] * rows[i][y];
                prop_assert_eq!(got.get(&(x + 1).to_string(), &(y + 1).to_string()), want);
            }
        }
    }

    #[test]
    fn transit_delivers_the_row(rows in (1usize..=3, 1usize..=3).prop_flat_map(|(n, m)| matrix(n, m, 2)), pick in 0usize..3) {
        let r = from_dense(&rows);
        let i = pick % rows.len();
        let a = area(r.clone());
        let t = transit(&a, &(i + 1).to_string(), &unit_payload(), BUDGET).unwrap();
        for (o, v) in rows[i].iter().enumerate() {
            prop_assert_eq!(t.counts[&(o + 1).to_string()], *v);
        }
        prop_assert!(canonical_equal_nets(&t.residual, &a));
        prop_assert_eq!(dense(&semantics(&a, BUDGET).unwrap(), rows.len(), rows[0].len()), rows);
    }
}

#[test]
fn normal_form_of_area_is_itself() {
    let a = area(rel(&[&[1, 2], &[2, 0]]));
    let nf = normalize(&NetSum::single(a.clone()), BUDGET).unwrap();
    assert_eq!(nf.len(), 1);
    assert!(canonical_equal_nets(nf.nets().next().unwrap(), &a));
}
