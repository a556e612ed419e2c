//! Type-and-effect inference for λ-amadio and lthis.
//!
//! Types are inferred by unification; latent effects are effect variables
//! solved as least sets at the end. Effect widening (sub) is applied at
//! abstractions and substitution nodes, which is where the rules need it.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::syntax::{lookup, Effect, RefSubst, RegionCtx, TermA, TermL, TypeExpr, VarCtx};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("({rule}) {reason}")]
    Rule { rule: &'static str, reason: String },
    #[error("reference context is not stratified")]
    NotStratified,
}

fn err<T>(rule: &'static str, reason: impl Into<String>) -> Result<T, TypeError> {
    Err(TypeError::Rule { rule, reason: reason.into() })
}

/// A witnessing order when `R` is stratified: each reference comes after every
/// reference in the latent effects of its type.
pub fn check_stratified(r: &RegionCtx) -> Option<Vec<String>> {
    let dom: BTreeSet<&str> = r.iter().map(|(n, _)| n.as_str()).collect();
    if dom.len() != r.len() {
        return None;
    }
    let mut deps: Vec<Effect> = Vec::new();
    for (_, a) in r {
        let e = a.eff();
        let mut regs = Effect::new();
        a.regions(&mut regs);
        if !e.iter().chain(regs.iter()).all(|s| dom.contains(s.as_str())) {
            return None;
        }
        deps.push(e);
    }
    let mut order: Vec<String> = Vec::new();
    let mut placed = vec![false; r.len()];
    while order.len() < r.len() {
        let next = (0..r.len()).find(|&i| !placed[i] && deps[i].iter().all(|s| order.contains(s)))?;
        placed[next] = true;
        order.push(r[next].0.clone());
    }
    Some(order)
}

/// Typing judgement conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Typing {
    pub ty: TypeExpr,
    pub eff: Effect,
}

/// A typing derivation for an lthis term; its shape mirrors the term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub ty: TypeExpr,
    pub eff: Effect,
    pub node: DNode<Derivation>,
}

/// One derivation step; `C` is the premise type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DNode<C> {
    Var(String),
    Star,
    Lam(String, Box<C>),
    App(Vec<(String, Vec<C>)>, Box<C>, Box<C>),
    Get(String),
    VarSubst(Vec<(String, C)>, Box<C>),
    DownSubst(Vec<(String, Vec<C>)>, Box<C>),
    UpSubst(Vec<(String, Vec<C>)>, Box<C>),
    Par(Box<C>, Box<C>),
    Sum(Vec<C>),
}

impl Derivation {
    pub fn typing(&self) -> Typing {
        Typing { ty: self.ty.clone(), eff: self.eff.clone() }
    }

    /// The term this derivation types.
    pub fn term(&self) -> TermL {
        let subst = |s: &[(String, Vec<Derivation>)]| -> RefSubst {
            s.iter().map(|(r, vs)| (r.clone(), vs.iter().map(Derivation::term).collect())).collect()
        };
        match &self.node {
            DNode::Var(x) => TermL::Var(x.clone()),
            DNode::Star => TermL::Star,
            DNode::Lam(x, b) => TermL::Lam(x.clone(), Box::new(b.term())),
            DNode::App(s, f, a) => TermL::App(subst(s), Box::new(f.term()), Box::new(a.term())),
            DNode::Get(r) => TermL::Get(r.clone()),
            DNode::VarSubst(s, m) => {
                TermL::VarSubst(s.iter().map(|(x, v)| (x.clone(), v.term())).collect(), Box::new(m.term()))
            }
            DNode::DownSubst(s, m) => TermL::DownSubst(subst(s), Box::new(m.term())),
            DNode::UpSubst(s, m) => TermL::UpSubst(subst(s), Box::new(m.term())),
            DNode::Par(a, b) => TermL::Par(Box::new(a.term()), Box::new(b.term())),
            DNode::Sum(ms) => TermL::Sum(ms.iter().map(Derivation::term).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ty {
    Var(usize),
    Unit,
    Beh,
    Threads(Box<Ty>, Box<Ty>),
    Arrow(Box<Ty>, usize, Box<Ty>),
    Reg(String, Box<Ty>),
}

#[derive(Debug, Clone, Default)]
struct EffE {
    refs: BTreeSet<String>,
    vars: BTreeSet<usize>,
}

impl EffE {
    fn refs(rs: impl IntoIterator<Item = String>) -> EffE {
        EffE { refs: rs.into_iter().collect(), vars: BTreeSet::new() }
    }

    fn union(mut self, o: &EffE) -> EffE {
        self.refs.extend(o.refs.iter().cloned());
        self.vars.extend(o.vars.iter().copied());
        self
    }
}

struct Draft {
    ty: Ty,
    eff: EffE,
    node: DNode<Draft>,
}

#[derive(Default)]
struct Solver {
    tvars: Vec<Option<Ty>>,
    parent: Vec<usize>,
    lower: Vec<BTreeSet<String>>,
    incl: Vec<BTreeSet<usize>>,
    fixed: Vec<Option<Effect>>,
    refs: BTreeMap<String, Ty>,
    infer_refs: bool,
    /// Types that must be value types, with the rule that demands it.
    values: Vec<(Ty, &'static str)>,
}

impl Solver {
    fn new(r: &RegionCtx, infer_refs: bool) -> Solver {
        let mut s = Solver { infer_refs, ..Solver::default() };
        for (name, a) in r {
            let t = s.from_type(a);
            s.refs.insert(name.clone(), t);
        }
        s
    }

    fn fresh_ty(&mut self) -> Ty {
        self.tvars.push(None);
        Ty::Var(self.tvars.len() - 1)
    }

    fn fresh_eff(&mut self, fixed: Option<Effect>) -> usize {
        let n = self.parent.len();
        self.parent.push(n);
        self.lower.push(BTreeSet::new());
        self.incl.push(BTreeSet::new());
        self.fixed.push(fixed);
        n
    }

    fn find(&mut self, e: usize) -> usize {
        let p = self.parent[e];
        if p == e {
            return e;
        }
        let r = self.find(p);
        self.parent[e] = r;
        r
    }

    fn from_type(&mut self, t: &TypeExpr) -> Ty {
        match t {
            TypeExpr::Unit => Ty::Unit,
            TypeExpr::Behavior => Ty::Beh,
            TypeExpr::Threads(a, b) => Ty::Threads(Box::new(self.from_type(a)), Box::new(self.from_type(b))),
            TypeExpr::Arrow(a, e, b) => {
                let a = self.from_type(a);
                let b = self.from_type(b);
                let v = self.fresh_eff(Some(e.clone()));
                Ty::Arrow(Box::new(a), v, Box::new(b))
            }
            TypeExpr::Reg(r, a) => Ty::Reg(r.clone(), Box::new(self.from_type(a))),
        }
    }

    fn shallow(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        while let Ty::Var(v) = t {
            match &self.tvars[v] {
                Some(u) => t = u.clone(),
                None => break,
            }
        }
        t
    }

    fn occurs(&self, v: usize, t: &Ty) -> bool {
        match self.shallow(t) {
            Ty::Var(w) => v == w,
            Ty::Unit | Ty::Beh => false,
            Ty::Threads(a, b) | Ty::Arrow(a, _, b) => self.occurs(v, &a) || self.occurs(v, &b),
            Ty::Reg(_, a) => self.occurs(v, &a),
        }
    }

    fn union_eff(&mut self, a: usize, b: usize, rule: &'static str) -> Result<(), TypeError> {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return Ok(());
        }
        let fixed = match (self.fixed[a].take(), self.fixed[b].take()) {
            (Some(x), Some(y)) if x != y => {
                return err(rule, format!("latent effects {{{}}} and {{{}}} differ", join(&x), join(&y)));
            }
            (x, y) => x.or(y),
        };
        self.parent[b] = a;
        let lb = std::mem::take(&mut self.lower[b]);
        self.lower[a].extend(lb);
        let ib = std::mem::take(&mut self.incl[b]);
        self.incl[a].extend(ib);
        self.fixed[a] = fixed;
        Ok(())
    }

    fn unify(&mut self, a: &Ty, b: &Ty, rule: &'static str) -> Result<(), TypeError> {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Ty::Var(v), Ty::Var(w)) if v == w => Ok(()),
            (Ty::Var(v), t) | (t, Ty::Var(v)) => {
                if self.occurs(*v, t) {
                    return err(rule, "infinite type");
                }
                self.tvars[*v] = Some(t.clone());
                Ok(())
            }
            (Ty::Unit, Ty::Unit) | (Ty::Beh, Ty::Beh) | (Ty::Beh, Ty::Threads(..)) | (Ty::Threads(..), Ty::Beh) => Ok(()),
            (Ty::Threads(a1, b1), Ty::Threads(a2, b2)) => {
                self.unify(a1, a2, rule)?;
                self.unify(b1, b2, rule)
            }
            (Ty::Arrow(a1, e1, b1), Ty::Arrow(a2, e2, b2)) => {
                self.unify(a1, a2, rule)?;
                self.union_eff(*e1, *e2, rule)?;
                self.unify(b1, b2, rule)
            }
            (Ty::Reg(r1, a1), Ty::Reg(r2, a2)) if r1 == r2 => self.unify(a1, a2, rule),
            _ => err(rule, format!("cannot match {} with {}", self.show(&a), self.show(&b))),
        }
    }

    fn show(&self, t: &Ty) -> String {
        match self.shallow(t) {
            Ty::Var(v) => format!("?{v}"),
            Ty::Unit => "Unit".into(),
            Ty::Beh | Ty::Threads(..) => "B".into(),
            Ty::Arrow(a, _, b) => format!("({} -> {})", self.show(&a), self.show(&b)),
            Ty::Reg(r, a) => format!("Reg {r} {}", self.show(&a)),
        }
    }

    fn ref_ty(&mut self, r: &str, rule: &'static str) -> Result<Ty, TypeError> {
        if let Some(t) = self.refs.get(r) {
            return Ok(t.clone());
        }
        if !self.infer_refs {
            return err(rule, format!("unknown reference {r}"));
        }
        let t = self.fresh_ty();
        self.refs.insert(r.to_string(), t.clone());
        self.values.push((t.clone(), rule));
        Ok(t)
    }

    fn infer(&mut self, g: &mut Vec<(String, Ty)>, m: &TermL) -> Result<Draft, TypeError> {
        Ok(match m {
            TermL::Var(x) => match g.iter().rev().find(|(y, _)| y == x) {
                Some((_, t)) => Draft { ty: t.clone(), eff: EffE::default(), node: DNode::Var(x.clone()) },
                None => return err("var", format!("unbound variable {x}")),
            },
            TermL::Star => Draft { ty: Ty::Unit, eff: EffE::default(), node: DNode::Star },
            TermL::Lam(x, b) => {
                let a = self.fresh_ty();
                self.values.push((a.clone(), "lam"));
                g.push((x.clone(), a.clone()));
                let body = self.infer(g, b);
                g.pop();
                let body = body?;
                let rho = self.fresh_eff(None);
                self.lower[rho].extend(body.eff.refs.iter().cloned());
                self.incl[rho].extend(body.eff.vars.iter().copied());
                let ty = Ty::Arrow(Box::new(a), rho, Box::new(body.ty.clone()));
                Draft { ty, eff: EffE::default(), node: DNode::Lam(x.clone(), Box::new(body)) }
            }
            TermL::App(s, f, a) => {
                let df = self.infer(g, f)?;
                let da = self.infer(g, a)?;
                self.values.push((da.ty.clone(), "app"));
                let beta = self.fresh_ty();
                let rho = self.fresh_eff(None);
                let want = Ty::Arrow(Box::new(da.ty.clone()), rho, Box::new(beta.clone()));
                self.unify(&df.ty, &want, "app")?;
                let ds = self.ref_subst(g, s)?;
                let mut eff = df.eff.clone().union(&da.eff);
                eff.vars.insert(rho);
                eff.refs.extend(s.keys().cloned());
                Draft { ty: beta, eff, node: DNode::App(ds, Box::new(df), Box::new(da)) }
            }
            TermL::Get(r) => {
                let t = self.ref_ty(r, "get")?;
                Draft { ty: t, eff: EffE::refs([r.clone()]), node: DNode::Get(r.clone()) }
            }
            TermL::VarSubst(s, b) => {
                let mut ds = Vec::new();
                for (x, v) in s {
                    if !v.is_value() {
                        return err("subst", format!("substituted term for {x} is not a value"));
                    }
                    let dv = self.infer(g, v)?;
                    ds.push((x.clone(), dv));
                }
                let n = g.len();
                for (x, dv) in &ds {
                    g.push((x.clone(), dv.ty.clone()));
                }
                let body = self.infer(g, b);
                g.truncate(n);
                let body = body?;
                Draft { ty: body.ty.clone(), eff: body.eff.clone(), node: DNode::VarSubst(ds, Box::new(body)) }
            }
            TermL::DownSubst(s, b) | TermL::UpSubst(s, b) => {
                let ds = self.ref_subst(g, s)?;
                let body = self.infer(g, b)?;
                let mut eff = body.eff.clone();
                eff.refs.extend(s.keys().cloned());
                let ty = body.ty.clone();
                let node = if matches!(m, TermL::DownSubst(..)) {
                    DNode::DownSubst(ds, Box::new(body))
                } else {
                    DNode::UpSubst(ds, Box::new(body))
                };
                Draft { ty, eff, node }
            }
            TermL::Par(a, b) => {
                let da = self.infer(g, a)?;
                let db = self.infer(g, b)?;
                let ty = Ty::Threads(Box::new(da.ty.clone()), Box::new(db.ty.clone()));
                let eff = da.eff.clone().union(&db.eff);
                Draft { ty, eff, node: DNode::Par(Box::new(da), Box::new(db)) }
            }
            TermL::Sum(ms) => {
                if ms.is_empty() {
                    return err("sum", "empty sum");
                }
                let mut ds = Vec::new();
                for t in ms {
                    ds.push(self.infer(g, t)?);
                }
                let ty = ds[0].ty.clone();
                let mut eff = EffE::default();
                for d in &ds {
                    self.unify(&ty, &d.ty, "sum")?;
                    eff = eff.union(&d.eff);
                }
                Draft { ty, eff, node: DNode::Sum(ds) }
            }
        })
    }

    fn ref_subst(&mut self, g: &mut Vec<(String, Ty)>, s: &RefSubst) -> Result<Vec<(String, Vec<Draft>)>, TypeError> {
        let mut out = Vec::new();
        for (r, vs) in s {
            let a = self.ref_ty(r, "subst-r")?;
            let mut ds = Vec::new();
            for v in vs {
                if !v.is_value() {
                    return err("subst-r", format!("substituted term for {r} is not a value"));
                }
                let dv = self.infer(g, v)?;
                self.unify(&a, &dv.ty, "subst-r")?;
                ds.push(dv);
            }
            out.push((r.clone(), ds));
        }
        Ok(out)
    }

    /// Least solution of the effect constraints, checked against annotations.
    fn solve(&mut self) -> Result<Vec<Effect>, TypeError> {
        let n = self.parent.len();
        let roots: Vec<usize> = (0..n).map(|e| self.find(e)).collect();
        let mut incl: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for e in 0..n {
            if roots[e] == e {
                incl[e] = self.incl[e].iter().map(|&v| roots[v]).collect();
            }
        }
        let mut sol: Vec<Effect> = (0..n).map(|e| self.lower[e].clone()).collect();
        for e in (0..n).filter(|&e| roots[e] == e) {
            if let Some(f) = &self.fixed[e] {
                sol[e].extend(f.iter().cloned());
            }
        }
        loop {
            let mut changed = false;
            for e in (0..n).filter(|&e| roots[e] == e) {
                let add: Vec<String> = incl[e]
                    .iter()
                    .flat_map(|&v| sol[v].iter().cloned())
                    .filter(|r| !sol[e].contains(r))
                    .collect();
                if !add.is_empty() {
                    changed = true;
                    sol[e].extend(add);
                }
            }
            if !changed {
                break;
            }
        }
        for e in (0..n).filter(|&e| roots[e] == e) {
            if let Some(f) = &self.fixed[e] {
                if !sol[e].is_subset(f) {
                    return err("lam", format!("latent effect {{{}}} exceeds annotation {{{}}}", join(&sol[e]), join(f)));
                }
            }
        }
        Ok((0..n).map(|e| sol[roots[e]].clone()).collect())
    }

    fn resolve(&self, t: &Ty, sol: &[Effect]) -> TypeExpr {
        match self.shallow(t) {
            Ty::Var(_) | Ty::Unit => TypeExpr::Unit,
            Ty::Beh => TypeExpr::Behavior,
            Ty::Threads(a, b) => TypeExpr::Threads(Box::new(self.resolve(&a, sol)), Box::new(self.resolve(&b, sol))),
            Ty::Arrow(a, e, b) => {
                TypeExpr::Arrow(Box::new(self.resolve(&a, sol)), sol[e].clone(), Box::new(self.resolve(&b, sol)))
            }
            Ty::Reg(r, a) => TypeExpr::Reg(r, Box::new(self.resolve(&a, sol))),
        }
    }

    fn resolve_eff(e: &EffE, sol: &[Effect]) -> Effect {
        let mut out = e.refs.clone();
        for &v in &e.vars {
            out.extend(sol[v].iter().cloned());
        }
        out
    }

    fn finish(&self, d: Draft, sol: &[Effect]) -> Derivation {
        let sub = |s: Vec<(String, Vec<Draft>)>| -> Vec<(String, Vec<Derivation>)> {
            s.into_iter().map(|(r, vs)| (r, vs.into_iter().map(|v| self.finish(v, sol)).collect())).collect()
        };
        let bx = |c: Box<Draft>| Box::new(self.finish(*c, sol));
        let node = match d.node {
            DNode::Var(x) => DNode::Var(x),
            DNode::Star => DNode::Star,
            DNode::Lam(x, b) => DNode::Lam(x, bx(b)),
            DNode::App(s, f, a) => DNode::App(sub(s), bx(f), bx(a)),
            DNode::Get(r) => DNode::Get(r),
            DNode::VarSubst(s, m) => DNode::VarSubst(s.into_iter().map(|(x, v)| (x, self.finish(v, sol))).collect(), bx(m)),
            DNode::DownSubst(s, m) => DNode::DownSubst(sub(s), bx(m)),
            DNode::UpSubst(s, m) => DNode::UpSubst(sub(s), bx(m)),
            DNode::Par(a, b) => DNode::Par(bx(a), bx(b)),
            DNode::Sum(ms) => DNode::Sum(ms.into_iter().map(|m| self.finish(m, sol)).collect()),
        };
        Derivation { ty: self.resolve(&d.ty, sol), eff: Solver::resolve_eff(&d.eff, sol), node }
    }

    fn check_values(&self) -> Result<(), TypeError> {
        for (t, rule) in &self.values {
            if matches!(self.shallow(t), Ty::Beh | Ty::Threads(..)) {
                return err(rule, "a behaviour is used where a value type is required");
            }
        }
        Ok(())
    }

    fn region_ctx(&self, given: &RegionCtx, sol: &[Effect]) -> RegionCtx {
        let mut out = given.clone();
        for (r, t) in &self.refs {
            if lookup(given, r).is_none() {
                out.push((r.clone(), self.resolve(t, sol)));
            }
        }
        out
    }
}

fn join(e: &Effect) -> String {
    e.iter().cloned().collect::<Vec<_>>().join(",")
}

fn run(
    r: &RegionCtx,
    g: &VarCtx,
    stores: &[(String, TermL)],
    m: Option<&TermL>,
    expected: Option<&TypeExpr>,
    infer_refs: bool,
) -> Result<(Option<Derivation>, RegionCtx), TypeError> {
    if !infer_refs && check_stratified(r).is_none() {
        return Err(TypeError::NotStratified);
    }
    let mut s = Solver::new(r, infer_refs);
    let mut env: Vec<(String, Ty)> = Vec::new();
    for (x, a) in g {
        if a.is_behavior() {
            return err("var", format!("variable {x} has a behaviour type"));
        }
        let t = s.from_type(a);
        env.push((x.clone(), t));
    }
    for (rname, v) in stores {
        let a = s.ref_ty(rname, "store")?;
        let dv = s.infer(&mut env, v)?;
        s.unify(&a, &dv.ty, "store")?;
    }
    let draft = match m {
        Some(m) => Some(s.infer(&mut env, m)?),
        None => None,
    };
    if let (Some(d), Some(t)) = (&draft, expected) {
        let t = s.from_type(t);
        s.unify(&d.ty, &t, "sub")?;
    }
    s.check_values()?;
    let sol = s.solve()?;
    let full = s.region_ctx(r, &sol);
    if check_stratified(&full).is_none() {
        return Err(TypeError::NotStratified);
    }
    Ok((draft.map(|d| s.finish(d, &sol)), full))
}

/// Threads and stores of a λ-amadio program, stores as lthis values.
pub(crate) fn split_program(p: &TermA) -> Result<(Option<TermL>, Vec<(String, TermL)>), TypeError> {
    let mut stores = Vec::new();
    let threads = strip_stores(p, &mut stores)?;
    Ok((threads, stores))
}

fn strip_stores(p: &TermA, stores: &mut Vec<(String, TermL)>) -> Result<Option<TermL>, TypeError> {
    match p {
        TermA::Store(r, v) => {
            let v = TermL::from_amadio(v).ok_or(TypeError::Rule { rule: "store", reason: "store under a store".into() })?;
            if !v.is_value() {
                return err("store", format!("stored term for {r} is not a value"));
            }
            stores.push((r.clone(), v));
            Ok(None)
        }
        TermA::Par(a, b) => {
            let a = strip_stores(a, stores)?;
            let b = strip_stores(b, stores)?;
            Ok(match (a, b) {
                (Some(a), Some(b)) => Some(TermL::Par(Box::new(a), Box::new(b))),
                (a, b) => a.or(b),
            })
        }
        t => {
            if let Some(rule) = nested_store(t) {
                return err(rule, "store inside a term");
            }
            if let TermA::Set(r, v) = t {
                if !v.is_value() {
                    return err("set", format!("written term for {r} is not a value"));
                }
            }
            Ok(TermL::from_amadio(t))
        }
    }
}

fn nested_store(t: &TermA) -> Option<&'static str> {
    match t {
        TermA::Store(..) => Some("store"),
        TermA::Var(_) | TermA::Star | TermA::Get(_) => None,
        TermA::Lam(_, b) => nested_store(b),
        TermA::Set(_, v) => nested_store(v),
        TermA::App(a, b) | TermA::Par(a, b) => nested_store(a).or_else(|| nested_store(b)),
    }
}

/// `R;Γ ⊢ M : (α, e)` for λ-amadio; every reference must be declared in `R`.
pub fn typecheck_amadio(r: &RegionCtx, g: &VarCtx, m: &TermA) -> Result<Typing, TypeError> {
    let (threads, stores) = split_program(m)?;
    let (d, _) = run(r, g, &stores, threads.as_ref(), None, false)?;
    Ok(d.map(|d| d.typing()).unwrap_or(Typing { ty: TypeExpr::Behavior, eff: Effect::new() }))
}

/// `R;Γ ⊢ M : (α, e)` for lthis, with its derivation.
pub fn typecheck_lthis(r: &RegionCtx, g: &VarCtx, m: &TermL) -> Result<Derivation, TypeError> {
    let (d, _) = run(r, g, &[], Some(m), None, false)?;
    Ok(d.expect("a term was given"))
}

/// As [`typecheck_lthis`], with the type of `m` widened to `ty`.
pub fn typecheck_lthis_at(r: &RegionCtx, g: &VarCtx, m: &TermL, ty: &TypeExpr) -> Result<Derivation, TypeError> {
    let (d, _) = run(r, g, &[], Some(m), Some(ty), false)?;
    Ok(d.expect("a term was given"))
}

/// `R` extended with inferred types for every reference the closed program uses
/// but `partial` does not declare.
pub fn infer_regions(partial: &RegionCtx, p: &TermA) -> Result<RegionCtx, TypeError> {
    let (threads, stores) = split_program(p)?;
    let (_, full) = run(partial, &VarCtx::new(), &stores, threads.as_ref(), None, true)?;
    Ok(full)
}
