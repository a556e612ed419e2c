use std::collections::BTreeMap;

use proptest::prelude::*;
use routenet::multirel::{LabelSet, MultirelError, Multirelation};

fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|k| k.to_string()).collect()
}

fn rel(rows: &[&[u64]]) -> Multirelation {
    let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
    let m = rows.first().map_or(0, Vec::len);
    Multirelation::from_rows(&labels(rows.len()), &labels(m), &rows).unwrap()
}

/// Dense product by explicit summation over intermediate labels.
fn product(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let m = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..m).map(|z| row.iter().zip(b).map(|(x, brow)| x * brow[z]).sum()).collect())
        .collect()
}

#[test]
fn identity_is_neutral() {
    let r = rel(&[&[1, 2, 0], &[0, 0, 4]]);
    let left = Multirelation::identity(r.domain().clone());
    let right = Multirelation::identity(r.codomain().clone());
    assert_eq!(left.compose(&r).unwrap(), r);
    assert_eq!(r.compose(&right).unwrap(), r);
}

#[test]
fn swap_squared_is_identity() {
    let swap = Multirelation::communication(2);
    assert_eq!(swap.compose(&swap).unwrap(), Multirelation::identity(LabelSet::numbered(2)));
}

#[test]
fn composition_example() {
    let r = rel(&[&[1, 2], &[0, 1]]);
    let s = rel(&[&[1, 0], &[1, 1]]);
    assert_eq!(r.compose(&s).unwrap().to_rows(), vec![vec![3, 2], vec![1, 1]]);
}

#[test]
fn composition_needs_matching_labels() {
    let r = rel(&[&[1, 2]]);
    let s = rel(&[&[1], &[0], &[1]]);
    assert!(matches!(r.compose(&s), Err(MultirelError::DomainMismatch { .. })));
}

#[test]
fn zero_entries_are_absent() {
    let r = rel(&[&[0, 3], &[0, 0]]);
    assert_eq!(r.entries().count(), 1);
    let mut r2 = r.clone();
    r2.set("1", "2", 0).unwrap();
    assert_eq!(r2.entries().count(), 0);
    assert!(matches!(r2.set("9", "1", 1), Err(MultirelError::UnknownLabel(_))));
}

#[test]
fn duplicate_labels_are_rejected() {
    assert!(matches!(LabelSet::new(["a", "a"]), Err(MultirelError::DuplicateLabel(_))));
}

#[test]
fn coproduct_is_block_diagonal() {
    let a = rel(&[&[1]]);
    let b = rel(&[&[2]]);
    let c = a.coproduct(&b);
    assert_eq!(c.get("L.1", "L.1"), 1);
    assert_eq!(c.get("R.1", "R.1"), 2);
    assert_eq!(c.get("L.1", "R.1"), 0);
    assert_eq!(c.get("R.1", "L.1"), 0);
    let empty = Multirelation::zero(LabelSet::numbered(0), LabelSet::numbered(0));
    let d = empty.coproduct(&a);
    assert_eq!(d.entries().collect::<Vec<_>>(), vec![("R.1", "R.1", 1)]);
}

#[test]
fn trace_examples() {
    let comm3 = Multirelation::communication(3);
    let t = comm3.trace_formula("1", "1").unwrap();
    let expected = Multirelation::from_rows(&["2", "3"], &["2", "3"], &[vec![1, 2], vec![2, 1]]).unwrap();
    assert_eq!(t, expected);

    let r = rel(&[&[0, 3], &[5, 0]]);
    let t = r.trace_formula("1", "1").unwrap();
    assert_eq!(t, Multirelation::from_rows(&["2"], &["2"], &[vec![15]]).unwrap());

    // empty row and column: plain restriction
    let r = rel(&[&[0, 0], &[0, 7]]);
    assert_eq!(r.trace_formula("1", "1").unwrap(), Multirelation::from_rows(&["2"], &["2"], &[vec![7]]).unwrap());
}

#[test]
fn trace_errors() {
    let r = rel(&[&[1, 0], &[0, 0]]);
    assert!(matches!(r.trace_formula("1", "1"), Err(MultirelError::CycleRisk { value: 1, .. })));
    assert!(matches!(r.trace_formula("x", "1"), Err(MultirelError::UnknownLabel(_))));
    assert!(matches!(r.trace_formula("1", "x"), Err(MultirelError::UnknownLabel(_))));
}

#[test]
fn profiles() {
    let z = Multirelation::zero(LabelSet::numbered(2), LabelSet::numbered(2));
    let p = z.profile();
    assert!(p.input_arity.values().all(|&a| a == 0));
    assert!(p.output_conn.values().all(|c| c.is_empty()));

    let p = Multirelation::communication(3).profile();
    assert!(p.input_arity.values().chain(p.output_arity.values()).all(|&a| a == 2));
    assert_eq!(p.input_conn["1"].iter().cloned().collect::<Vec<_>>(), vec!["2", "3"]);

    let r = Multirelation::from_rows(&["i1"], &["o1", "o2", "o3"], &[vec![2, 0, 1]]).unwrap();
    let p = r.profile();
    assert_eq!(p.input_arity["i1"], 3);
    assert_eq!(p.input_conn["i1"].iter().cloned().collect::<Vec<_>>(), vec!["o1", "o3"]);
}

#[test]
fn text_format_round_trips() {
    let r = Multirelation::from_rows(&["b", "a"], &["y", "x"], &[vec![1, 0], vec![2, 3]]).unwrap();
    let text = r.to_string();
    assert_eq!(text, "in: a b\nout: x y\n3 2\n0 1\n");
    assert_eq!(text.parse::<Multirelation>().unwrap(), r);
    assert!(matches!("in: a\nout: x\n1 2\n".parse::<Multirelation>(), Err(MultirelError::Parse { .. })));
    assert!(matches!("in: a\nout: x\nz\n".parse::<Multirelation>(), Err(MultirelError::Parse { line: 3, .. })));
}

#[test]
fn overflow_is_reported() {
    let big = rel(&[&[u64::MAX, u64::MAX]]);
    let col = rel(&[&[2], &[1]]);
    assert!(matches!(big.compose(&col), Err(MultirelError::Overflow)));
}

fn matrix(n: usize, m: usize, max: u64) -> impl Strategy<Value = Vec<Vec<u64>>> {
    prop::collection::vec(prop::collection::vec(0..=max, m), n)
}

fn dense(rows: &[Vec<u64>], m: usize) -> Multirelation {
    Multirelation::from_rows(&labels(rows.len()), &labels(m), rows).unwrap()
}

fn chain() -> impl Strategy<Value = (Vec<Vec<u64>>, Vec<Vec<u64>>, Vec<Vec<u64>>, usize)> {
    (1usize..=5, 1usize..=5, 1usize..=5, 1usize..=5)
        .prop_flat_map(|(a, b, c, d)| (matrix(a, b, 4), matrix(b, c, 4), matrix(c, d, 4), Just(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_is_associative((a, b, c, d) in chain()) {
        let (r, s, t) = (dense(&a, b.len()), dense(&b, c.len()), dense(&c, d));
        let left = r.compose(&s).unwrap().compose(&t).unwrap();
        let right = r.compose(&s.compose(&t).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left.to_rows(), product(&product(&a, &b), &c));
    }

    #[test]
    fn identity_laws(rows in (1usize..=5, 1usize..=5).prop_flat_map(|(n, m)| matrix(n, m, 4))) {
        let r = dense(&rows, rows[0].len());
        prop_assert_eq!(Multirelation::identity(r.domain().clone()).compose(&r).unwrap(), r.clone());
        prop_assert_eq!(r.compose(&Multirelation::identity(r.codomain().clone())).unwrap(), r);
    }

    #[test]
    fn trace_commutes_with_relabelling(rows in matrix(3, 3, 3), i in 1usize..=3, o in 1usize..=3, rot in 0usize..3) {
        let mut r = dense(&rows, 3);
        let (i, o) = (i.to_string(), o.to_string());
        r.set(&i, &o, 0).unwrap();
        let name = |k: &str| format!("n{}", (k.parse::<usize>().unwrap() + rot) % 3);
        let f: BTreeMap<String, String> = labels(3).iter().map(|l| (l.clone(), name(l))).collect();
        let traced_then_renamed = r.trace_formula(&i, &o).unwrap().relabel(&f, &f).unwrap();
        let renamed_then_traced = r.relabel(&f, &f).unwrap().trace_formula(&name(&i), &name(&o)).unwrap();
        prop_assert_eq!(traced_then_renamed, renamed_then_traced);
    }

    #[test]
    fn support_is_below(rows in (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| matrix(n, m, 3))) {
        let r = dense(&rows, rows[0].len());
        let s = Multirelation::from_relation(r.domain().clone(), r.codomain().clone(), &r.support()).unwrap();
        prop_assert!(s.le(&r));
        let p = r.profile();
        for (l, a) in &p.input_arity {
            prop_assert!(*a >= p.input_conn[l].len() as u64);
        }
    }
}
