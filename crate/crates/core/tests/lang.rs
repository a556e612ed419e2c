use proptest::prelude::*;
use routenet::lang::*;
use routenet::verify::{case_rng, gen};

const BUDGET: usize = 10_000;

fn t(s: &str) -> TermA {
    parse_program(s).unwrap()
}

fn ctx(s: &str) -> RegionCtx {
    parse_region_ctx(s).unwrap()
}

fn ty(s: &str) -> TypeExpr {
    parse_type(s).unwrap()
}

fn eff(rs: &[&str]) -> Effect {
    rs.iter().map(|r| r.to_string()).collect()
}

const PROJ: &str = "(\\x. x (\\z. z) (\\z. *)) (get r)
(\\y. set r y) (get s)
set s (\\a b. a)
set s (\\a b. b)";

#[test]
fn parse_and_print() {
    let m = t("(\\x. x) *");
    assert_eq!(m, TermA::app(TermA::lam("x", TermA::var("x")), TermA::Star));
    assert_eq!(m.to_string(), "(\\x. x) *");
    let p = t("\\x. x || *");
    assert!(matches!(p, TermA::Lam(..)));
    let q = t("(\\x. x) || r <= * || set r (\\y. y)");
    assert_eq!(q.threads().len(), 3);
    for src in ["(\\x. x) || r <= * || set r (\\y. y)", PROJ, "f (get r) (\\x. x) || x", "\\x. x y || z"] {
        let m = t(src);
        assert_eq!(parse_term(&m.to_string()).unwrap(), m, "{src}");
    }
    assert_eq!(parse_term("(\\x. x").unwrap_err().offset, 6);
    assert_eq!(parse_program("*\nset r (get s)\n").unwrap_err().offset, 8);
    assert!(parse_term("r <= get s").is_err());
}

#[test]
fn parse_types() {
    assert_eq!(ty("Unit -> Unit -> Unit"), TypeExpr::arrow(TypeExpr::Unit, &[], TypeExpr::arrow(TypeExpr::Unit, &[], TypeExpr::Unit)));
    assert_eq!(ty("(Unit -{r,s}> Unit) -> B"), TypeExpr::arrow(TypeExpr::arrow(TypeExpr::Unit, &["r", "s"], TypeExpr::Unit), &[], TypeExpr::Behavior));
    assert_eq!(ty("Reg r Unit"), TypeExpr::Reg("r".into(), Box::new(TypeExpr::Unit)));
    for s in ["Unit -{r}> Unit -> B", "(Unit -> Unit) -{s}> Unit", "Reg r (Unit -> Unit)"] {
        assert_eq!(ty(&ty(s).to_string()), ty(s));
    }
    let r = ctx("# refs\nr : Unit\ns : Unit -{r}> Unit\n");
    assert_eq!(r.len(), 2);
    assert!(parse_region_ctx("r : Unit\nr : Unit").is_err());
}

#[test]
fn stratification() {
    assert_eq!(check_stratified(&ctx("r : Unit")), Some(vec!["r".to_string()]));
    assert_eq!(check_stratified(&ctx("r : Unit -{r}> Unit")), None);
    assert_eq!(check_stratified(&ctx("r2 : Unit -{r1}> Unit\nr1 : Unit")), Some(vec!["r1".to_string(), "r2".to_string()]));
    assert_eq!(check_stratified(&ctx("r : Unit -{s}> Unit")), None);
    assert_eq!(check_stratified(&ctx("r : Unit -{s}> Unit\ns : Unit -{r}> Unit")), None);
}

#[test]
fn typing_rules() {
    let r = ctx("r : Unit");
    let g = VarCtx::new();
    let tc = |m: &str| typecheck_amadio(&r, &g, &t(m));
    assert_eq!(tc("get r").unwrap(), Typing { ty: TypeExpr::Unit, eff: eff(&["r"]) });
    assert_eq!(tc("set r *").unwrap(), Typing { ty: TypeExpr::Unit, eff: eff(&["r"]) });
    assert_eq!(tc("\\x. set r x").unwrap(), Typing { ty: TypeExpr::arrow(TypeExpr::Unit, &["r"], TypeExpr::Unit), eff: eff(&[]) });
    assert_eq!(tc("(\\x. set r x) *").unwrap().eff, eff(&["r"]));
    let p = tc("get r || *").unwrap();
    assert!(p.ty.is_behavior());
    assert_eq!(p.eff, eff(&["r"]));
    assert_eq!(tc("* || r <= *").unwrap(), Typing { ty: TypeExpr::Unit, eff: eff(&[]) });
    assert_eq!(tc("r <= *").unwrap().ty, TypeExpr::Behavior);
    assert!(matches!(tc("get q"), Err(TypeError::Rule { rule: "get", .. })));
    assert!(matches!(tc("* *"), Err(TypeError::Rule { rule: "app", .. })));
    assert!(matches!(tc("x"), Err(TypeError::Rule { rule: "var", .. })));
    assert!(matches!(tc("(\\x. *) (* || *)"), Err(TypeError::Rule { .. })));
    let ann = ctx("r : Unit\nf : Unit -> Unit");
    assert!(typecheck_amadio(&ann, &g, &t("f <= \\x. get r")).is_err());
    assert!(typecheck_amadio(&ann, &g, &t("f <= \\x. x")).is_ok());
    let g = vec![("y".to_string(), TypeExpr::Unit)];
    assert_eq!(typecheck_amadio(&r, &g, &t("y")).unwrap().ty, TypeExpr::Unit);
}

#[test]
fn lthis_rules() {
    let r = ctx("r : Unit");
    let g = VarCtx::new();
    let mut sigma = std::collections::BTreeMap::new();
    sigma.insert("x".to_string(), TermL::Star);
    let m = TermL::VarSubst(sigma, Box::new(TermL::Var("x".into())));
    assert_eq!(typecheck_lthis(&r, &g, &m).unwrap().typing(), Typing { ty: TypeExpr::Unit, eff: eff(&[]) });
    let par = TermL::Par(Box::new(TermL::Get("r".into())), Box::new(TermL::Star));
    let d = typecheck_lthis(&r, &g, &par).unwrap();
    assert!(d.ty.is_behavior());
    assert_eq!(d.eff, eff(&["r"]));
    let sum = TermL::Sum(vec![TermL::Star, TermL::Get("r".into())]);
    assert_eq!(typecheck_lthis(&r, &g, &sum).unwrap().typing(), Typing { ty: TypeExpr::Unit, eff: eff(&["r"]) });
    let mut vs = RefSubst::new();
    vs.insert("r".to_string(), vec![TermL::Star, TermL::Star]);
    let down = TermL::DownSubst(vs, Box::new(TermL::Get("r".into())));
    assert_eq!(typecheck_lthis(&r, &g, &down).unwrap().term(), down);
}

#[test]
fn region_inference() {
    let full = infer_regions(&RegionCtx::new(), &t(PROJ)).unwrap();
    let a = ty("Unit -> Unit");
    let p = TypeExpr::arrow(a.clone(), &[], TypeExpr::arrow(a.clone(), &[], a));
    assert_eq!(full, vec![("r".to_string(), p.clone()), ("s".to_string(), p)]);
    let f = infer_regions(&RegionCtx::new(), &t("f <= \\x. get r\nr <= *")).unwrap();
    assert_eq!(f[0].1, TypeExpr::arrow(TypeExpr::Unit, &["r"], TypeExpr::Unit));
    assert_eq!(infer_regions(&RegionCtx::new(), &t("r <= \\x. (\\y. *) (get s)\ns <= \\x. (\\y. *) (get r)")), Err(TypeError::NotStratified));
}

#[test]
fn one_step_reducts() {
    assert_eq!(step(&t("(\\x. x) *")), vec![TermA::Star]);
    let s = step(&t("set r (\\x. x)"));
    assert_eq!(s.len(), 1);
    assert_eq!(State::of(&s[0]), State::of(&t("* || r <= \\x. x")));
    let g = step(&t("get r || r <= *\nr <= \\x. x"));
    assert_eq!(g.len(), 2);
    assert!(step(&t("get r")).is_empty());
    assert!(step(&t("* || \\x. x")).is_empty());
    // evaluation is left to right
    let l = step(&t("(set r *) (set s *)"));
    assert_eq!(l.len(), 1);
    assert_eq!(State::of(&l[0]).stores[0].0, "r");
}

#[test]
fn outcomes() {
    let star = vec![vec!["*".to_string()]];
    let keys = |p: &str| values(&t(p), BUDGET).unwrap().iter().map(Outcome::key).collect::<Vec<_>>();
    assert_eq!(keys("*"), star);
    assert_eq!(keys("get r || r <= *"), star);
    assert_eq!(keys("(\\x. x) *"), star);
    assert!(keys("get r").is_empty());
    let proj = keys(PROJ);
    assert_eq!(proj.len(), 2);
    let want_one = |v: &str| {
        let mut k = vec![t(v).alpha_key(), "*".to_string(), "*".to_string(), "*".to_string()];
        k.sort();
        k
    };
    assert!(proj.contains(&want_one("\\z. z")));
    assert!(proj.contains(&want_one("\\z. *")));
    assert_eq!(values(&t("(\\f. f f *) (\\f. f f *)"), 50), Err(EvalError::BudgetExhausted { budget: 50 }));
}

#[test]
fn alpha_keys() {
    assert_eq!(t("\\x. \\y. x").alpha_key(), t("\\a. \\b. a").alpha_key());
    assert_ne!(t("\\x. \\y. x").alpha_key(), t("\\a. \\b. b").alpha_key());
    // capture avoidance
    let m = t("\\y. x").subst("x", &TermA::var("y"));
    assert_eq!(m.alpha_key(), t("\\z. y").alpha_key());
}

#[test]
fn embedding() {
    let r = ctx("r : Unit\nf : Unit -{r}> Unit");
    let v = t("\\x. x");
    assert_eq!(embed_lthis(&r, &v, &[]).unwrap(), TermL::from_amadio(&v).unwrap());
    let store = vec![("r".to_string(), TermA::Star)];
    let e = embed_lthis(&r, &t("get r"), &store).unwrap();
    assert!(matches!(e, TermL::DownSubst(ref s, _) if s["r"] == vec![TermL::Star]));
    let e = embed_lthis(&r, &t("(\\x. get r) *"), &store).unwrap();
    assert!(matches!(e, TermL::App(ref s, _, _) if s.contains_key("r")));
    let e = embed_lthis(&r, &t("(\\x. x) *"), &store).unwrap();
    assert!(matches!(e, TermL::App(ref s, _, _) if s.is_empty()));
    let p = embed_program(&r, &t("get r || r <= * || r <= *")).unwrap().unwrap();
    let d = typecheck_lthis(&r, &VarCtx::new(), &p).unwrap();
    assert_eq!(d.eff, eff(&["r"]));
    assert_eq!(embed_program(&r, &t("r <= *")).unwrap(), None);
}

fn reassociate(ts: &[TermA], shape: &[bool]) -> TermA {
    // fold threads right or left by the shape bits
    let mut it = ts.iter().cloned();
    let mut acc = it.next().unwrap();
    for (k, x) in it.enumerate() {
        acc = if shape.get(k).copied().unwrap_or(false) { TermA::par(x, acc) } else { TermA::par(acc, x) };
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn values_ignore_par_shape(shape in prop::collection::vec(any::<bool>(), 4)) {
        let p = t(PROJ);
        let ts: Vec<TermA> = p.threads().into_iter().cloned().collect();
        let q = reassociate(&ts, &shape);
        let a: Vec<_> = values(&p, BUDGET).unwrap().iter().map(Outcome::key).collect();
        let b: Vec<_> = values(&q, BUDGET).unwrap().iter().map(Outcome::key).collect();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn in_place_steps_keep_thread_positions() {
    let p = t("(\\x. x) * || get r || r <= *");
    let reducts = step_in_place(&p);
    let keys: Vec<String> = reducts.iter().map(|q| q.without_stores().unwrap().to_string()).collect();
    assert!(keys.contains(&t("* || get r").to_string()), "{keys:?}");
    assert!(keys.contains(&t("(\\x. x) * || *").to_string()), "{keys:?}");
    let set: std::collections::BTreeSet<String> = step(&p).iter().map(TermA::alpha_key).collect();
    for q in &reducts {
        let same = step(&p).iter().any(|s| values(s, BUDGET).unwrap() == values(q, BUDGET).unwrap());
        assert!(same, "{q} has no counterpart among {set:?}");
    }
}

#[test]
fn final_trees_of_proj() {
    let finals = final_trees(&t(PROJ), BUDGET).unwrap();
    let shapes: std::collections::BTreeSet<String> =
        finals.iter().map(|q| q.without_stores().unwrap().alpha_key()).collect();
    assert_eq!(shapes.len(), 2, "{shapes:?}");
    assert!(finals.iter().all(|q| q.threads().iter().all(|th| th.is_value())));
}

#[test]
fn typing_at_a_wider_type() {
    let r = ctx("r : Unit\nf : Unit -{r}> Unit");
    let v = TermL::from_amadio(&t("\\x. x")).unwrap();
    let narrow = typecheck_lthis(&r, &VarCtx::new(), &v).unwrap();
    assert_eq!(narrow.ty, ty("Unit -{}> Unit"));
    let wide = ty("Unit -{r}> Unit");
    assert_eq!(typecheck_lthis_at(&r, &VarCtx::new(), &v, &wide).unwrap().ty, wide);
    let g = TermL::from_amadio(&t("\\x. get r")).unwrap();
    assert!(typecheck_lthis_at(&r, &VarCtx::new(), &g, &ty("Unit -{}> Unit")).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reducts_stay_typed_and_closed(seed in any::<u64>()) {
        let r = ctx(gen::PROGRAM_REFS);
        let p = gen::program(&mut case_rng(seed, 0));
        let tp = typecheck_amadio(&r, &VarCtx::new(), &p).unwrap();
        let lp = embed_program(&r, &p).unwrap();
        for q in step_in_place(&p) {
            prop_assert!(q.free_vars().is_empty(), "{} has free variables", q);
            let tq = typecheck_amadio(&r, &VarCtx::new(), &q);
            prop_assert!(tq.is_ok(), "{} does not type: {:?}", q, tq);
            prop_assert!(tq.unwrap().eff.is_subset(&tp.eff));
            if let (Some(lp), Some(lq)) = (&lp, embed_program(&r, &q).unwrap()) {
                let want = typecheck_lthis(&r, &VarCtx::new(), lp).unwrap().ty;
                prop_assert!(typecheck_lthis_at(&r, &VarCtx::new(), &lq, &want).is_ok(), "{} at {}", q, want);
            }
        }
    }

    #[test]
    fn embeddings_type(seed in any::<u64>()) {
        let r = ctx(gen::PROGRAM_REFS);
        let p = gen::program(&mut case_rng(seed, 1));
        if let Some(l) = embed_program(&r, &p).unwrap() {
            prop_assert!(typecheck_lthis(&r, &VarCtx::new(), &l).is_ok());
        }
    }
}
