//! Seeded verification suites over the routing algebra, the rewriting engine
//! and the compiler.

pub mod gen;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::{parse_program, parse_region_ctx, step, step_in_place, values, RegionCtx, TermA, State};
use crate::multirel::Multirelation;
use crate::paths::count_paths;
use crate::proofnet::{canonical_equal_nets, canonical_key, parse_net, serialize_net, Net, NetSum};
use crate::rewrite::{apply, deep_normalize, find_redexes, normalize, reduction_graph, Policy};
use crate::routing::{
    build_area, compose_areas, inputs, outputs, path_semantics, read_area, semantics, strip_label, trace_net, transit,
    unit_payload, RoutingArea,
};
use crate::translate::{compile, compile_at, is_value_net, outcome_keys, program_regions, program_type, value_key};

pub const SUITES: [&str; 10] =
    ["trace", "paths", "compose", "charact", "preserve", "transit", "confluence", "simulate", "adequacy", "json"];

/// Programs for the simulation and adequacy suites, each with its reference context.
pub const PROGRAMS: [(&str, &str, &str); 18] = [
    ("unit", "", "*"),
    ("identity", "", "(\\x. x) *"),
    ("second", "", "(\\x y. y) * *"),
    ("higher", "", "(\\f. f *) (\\x. x)"),
    ("twice", "", "(\\f x. f (f x)) (\\y. y) *"),
    ("shadow", "", "(\\x. (\\x. x) x) *"),
    ("inner", "", "(\\x. (\\y. y) x) *"),
    ("threads", "", "* || (\\x. x) *"),
    ("set", "", "set r *"),
    ("set-get", "", "set r * || get r"),
    ("store-get", "", "get r || r <= *"),
    ("choice", "", "get f || f <= (\\x. x) || f <= (\\y. *)"),
    ("write-read", "", "(\\u. get r) (set r *)"),
    ("set-arg", "", "(\\x. set r x) * || get r"),
    ("call-stored", "", "(\\u. (get f) *) (set f (\\x. x))"),
    ("effectful-store", "r : Unit\ng : Unit -{r}> Unit", "(\\u. (get g) *) (set g (\\x. get r)) || r <= *"),
    ("read-twice", "", "(\\x. (\\y. *) (get r)) (get r) || r <= *"),
    (
        "proj",
        "",
        "(\\x. x (\\z. z) (\\z. *)) (get r)\n(\\y. set r y) (get s)\nset s (\\a b. a)\nset s (\\a b. b)",
    ),
];

/// Parsed entry of [`PROGRAMS`].
pub fn fixed_program(i: usize) -> (String, RegionCtx, TermA) {
    let (name, ctx, src) = PROGRAMS[i];
    (name.to_string(), parse_region_ctx(ctx).unwrap(), parse_program(src).unwrap())
}

/// Outcome of one suite run.
#[derive(Clone, Debug)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    /// Failing case indices with a reason, in index order.
    pub failures: Vec<(usize, String)>,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.cases - self.failures.len()
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} seed {}: {}/{} pass", self.suite, self.seed, self.passed(), self.cases)?;
        for (i, why) in &self.failures {
            writeln!(f, "  case {i}: {why}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown suite {0}")]
pub struct UnknownSuite(pub String);

/// Runs `cases` cases of `suite`; case `k` draws from its own generator seeded by `(seed, k)`.
pub fn run_suite(suite: &str, seed: u64, cases: usize, budget: usize) -> Result<Report, UnknownSuite> {
    let case: fn(&mut ChaCha8Rng, usize) -> Result<(), String> = match suite {
        "trace" => trace_case,
        "paths" => paths_case,
        "compose" => compose_case,
        "charact" => charact_case,
        "preserve" => preserve_case,
        "transit" => transit_case,
        "confluence" => confluence_case,
        "simulate" => |rng, b| simulate(&program_refs(), &program(rng), b),
        "adequacy" => |rng, b| adequacy(&program_refs(), &program(rng), b).map(|_| ()),
        "json" => json_case,
        _ => return Err(UnknownSuite(suite.to_string())),
    };
    let mut failures = Vec::new();
    for k in 0..cases {
        let mut rng = case_rng(seed, k);
        if let Err(why) = case(&mut rng, budget) {
            failures.push((k, why));
        }
    }
    Ok(Report { suite: suite.to_string(), seed, cases, failures })
}

pub fn case_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

fn program_refs() -> RegionCtx {
    parse_region_ctx(gen::PROGRAM_REFS).unwrap()
}

fn program(rng: &mut ChaCha8Rng) -> TermA {
    gen::program(rng)
}

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

fn check(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn trace_case(rng: &mut ChaCha8Rng, budget: usize) -> Result<(), String> {
    let (r, i, o) = gen::trace_case(rng);
    let net = build_area(&RoutingArea::new(r.clone()));
    let t = trace_net(&net, &i, &o, budget).map_err(err)?;
    let got = semantics(&t, budget).map_err(err)?;
    let want = r.trace_formula(&i, &o).map_err(err)?;
    check(got == want, || format!("trace of {r} at ({i},{o}): got\n{got}want\n{want}"))
}

fn paths_case(rng: &mut ChaCha8Rng, budget: usize) -> Result<(), String> {
    let (r, _, _) = gen::trace_case(rng);
    let area = build_area(&RoutingArea::new(r));
    let net = gen::routing_net(rng, 25);
    for n in [area, net] {
        let s = semantics(&n, budget).map_err(err)?;
        let p = path_semantics(&n).map_err(err)?;
        check(s == p, || format!("semantics\n{s}differs from path semantics\n{p}"))?;
    }
    Ok(())
}

fn strip_tags(r: &Multirelation) -> Multirelation {
    let untag = |side: &str| -> BTreeMap<String, String> {
        ["1", "2", "3"].iter().map(|l| (format!("{side}{l}"), l.to_string())).collect()
    };
    r.relabel(&untag("L."), &untag("R.")).unwrap()
}

fn compose_case(rng: &mut ChaCha8Rng, budget: usize) -> Result<(), String> {
    let a = gen::square(rng, 3, 3, 2);
    let b = gen::square(rng, 3, 3, 2);
    let (na, nb) = (build_area(&RoutingArea::new(a.clone())), build_area(&RoutingArea::new(b.clone())));
    let labels = ["1", "2", "3"];
    let c = compose_areas(&na, &labels, &nb, &labels, budget).map_err(err)?;
    let got = strip_tags(&semantics(&c, budget).map_err(err)?);
    let want = matrix_product(&a, &b);
    check(got == want, || format!("composite\n{got}differs from product\n{want}"))
}

/// Product by explicit summation over the middle labels.
fn matrix_product(a: &Multirelation, b: &Multirelation) -> Multirelation {
    let ins = a.domain().sorted();
    let mid = a.codomain().sorted();
    let outs = b.codomain().sorted();
    let rows: Vec<Vec<u64>> = ins
        .iter()
        .map(|x| outs.iter().map(|z| mid.iter().map(|y| a.get(x, y) * b.get(y, z)).sum()).collect())
        .collect();
    Multirelation::from_rows(&ins, &outs, &rows).unwrap()
}

fn charact_case(rng: &mut ChaCha8Rng, budget: usize) -> Result<(), String> {
    let n = gen::routing_net(rng, 25);
    let nf = normalize(&NetSum::single(n), budget).map_err(err)?;
    for m in nf.nets() {
        read_area(m).map_err(err)?;
    }
    Ok(())
}

/// Path counts between every input and output, by label.
fn path_table(n: &Net) -> Result<BTreeMap<(String, String), u64>, String> {
    let mut t = BTreeMap::new();
    for (ip, il) in inputs(n) {
        for (op, ol) in outputs(n) {
            let k = count_paths(n, ip, op).map_err(err)?;
            t.insert((strip_label(&il).to_string(), strip_label(&ol).to_string()), k);
        }
    }
    Ok(t)
}

fn preserve_case(rng: &mut ChaCha8Rng, budget: usize) -> Result<(), String> {
    let mut n = gen::routing_net(rng, 25);
    let want = path_table(&n)?;
    for _ in 0..budget {
        let redexes = find_redexes(&n, Policy::All);
        if redexes.is_empty() {
            return Ok(());
        }
        for r in &redexes {
            let out = apply(&n, r).map_err(err)?;
            for m in out.nets() {
                let got = path_table(m)?;
                check(got == want, || format!("step {r} changes path counts {want:?} to {got:?}"))?;
            }
        }
        let out = apply(&n, &redexes[0]).map_err(err)?;
        n = match out.into_nets().pop() {
            Some(m) => m,
            None => return Ok(()),
        };
    }
    Err("budget exhausted".into())
}

fn transit_case(rng: &mut ChaCha8Rng, budget: usize) -> Result<(), String> {
    let r = gen::area(rng, 4, 4, 3);
    let i = r.domain().sorted()[rng.gen_range(0..r.domain().len())].clone();
    let area = build_area(&RoutingArea::new(r.clone()));
    let t = transit(&area, &i, &unit_payload(), budget).map_err(err)?;
    for o in r.codomain().iter() {
        let got = t.counts.get(o).copied().unwrap_or(0);
        check(got == r.get(&i, o), || format!("output {o} receives {got} copies, R({i},{o}) = {}", r.get(&i, o)))?;
    }
    check(canonical_equal_nets(&t.residual, &area), || "residual differs from the original area".into())
}

fn confluence_case(rng: &mut ChaCha8Rng, _budget: usize) -> Result<(), String> {
    let n = gen::valid_net(rng, 12);
    let g = reduction_graph(&n, 5000);
    check(!g.truncated, || "reduction graph exceeds 5000 nodes".into())?;
    let sinks = g.sinks();
    if sinks.is_empty() {
        return Ok(());
    }
    check(sinks.len() == 1, || format!("{} distinct normal forms", sinks.len()))?;
    check(!g.has_cycle(), || "normalizing net with a reduction cycle".into())
}

fn json_case(rng: &mut ChaCha8Rng, _budget: usize) -> Result<(), String> {
    let n = if rng.gen_bool(0.5) { gen::valid_net(rng, 15) } else { gen::routing_net(rng, 15) };
    let text = serialize_net(&n);
    let back = parse_net(&text).map_err(err)?;
    check(serialize_net(&back) == text, || "re-serialization differs".into())?;
    check(back == n, || "parsed net differs".into())
}

fn deep_keys(n: Net, budget: usize) -> Result<BTreeSet<String>, String> {
    let nf = deep_normalize(&NetSum::single(n), budget).map_err(err)?;
    Ok(nf.keys().into_iter().map(str::to_string).collect())
}

/// Every one-step reduct `N` of `p` has its normal-form summands among those of `p`.
/// Reducts keep the thread layout of `p`, so nets are compared without reordering `⅋` trees.
pub fn simulate(partial: &RegionCtx, p: &TermA, budget: usize) -> Result<(), String> {
    let r = program_regions(partial, p).map_err(err)?;
    let whole = deep_keys(compile(&r, p).map_err(err)?, budget)?;
    let ty = program_type(&r, p).map_err(err)?;
    let moved: BTreeSet<String> = step_in_place(p).iter().map(|n| State::of(n).key()).collect();
    let all: BTreeSet<String> = step(p).iter().map(|n| State::of(n).key()).collect();
    check(moved == all, || format!("in-place reducts of {p} differ from its reducts"))?;
    for n in step_in_place(p) {
        let part = deep_keys(compile_at(&r, &n, ty.as_ref()).map_err(|e| format!("{n}: {e}"))?, budget)?;
        check(part.is_subset(&whole), || format!("normal form of reduct {n} is not contained in that of {p}"))?;
    }
    Ok(())
}

/// Value summands of the normal form of `p` biject with its outcomes; returns their number.
pub fn adequacy(partial: &RegionCtx, p: &TermA, budget: usize) -> Result<usize, String> {
    let r = program_regions(partial, p).map_err(err)?;
    let nf = deep_normalize(&NetSum::single(compile(&r, p).map_err(err)?), budget).map_err(err)?;
    let mut found: BTreeMap<Vec<String>, String> = BTreeMap::new();
    for n in nf.nets().filter(|n| is_value_net(n)) {
        let k = value_key(n, budget).map_err(err)?.ok_or("value summand without thread keys")?;
        if found.insert(k, canonical_key(n)).is_some() {
            return Err("two value summands read as the same outcome".into());
        }
    }
    let outs = values(p, budget).map_err(err)?;
    let want = outcome_keys(&r, p, budget).map_err(err)?;
    let got: BTreeSet<Vec<String>> = found.into_keys().collect();
    check(got == want, || {
        let shown: Vec<String> = outs.iter().map(|o| o.to_string()).collect();
        format!("{} value summands against outcomes {}", got.len(), shown.join(" "))
    })?;
    check(outs.len() == want.len(), || "distinct outcomes share a net".into())?;
    Ok(got.len())
}
