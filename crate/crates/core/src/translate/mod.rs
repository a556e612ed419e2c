//! Compiler from typed lthis derivations to nets.
//!
//! A translated term is a net with free ports `out` (the term's value),
//! `x:NAME` per context variable, and `rin:r`/`rout:r` per reference of its
//! effect. The wiring is described in `docs/translation.md`.

pub(crate) mod build;
mod value;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::lang::{
    check_stratified, embed_program, EvalError, infer_regions, typecheck_lthis, typecheck_lthis_at, DNode, Derivation, Effect, RegionCtx, TermA,
    TypeError, TypeExpr, VarCtx,
};
use crate::proofnet::{Formula, Net, PortId, Symbol};
use crate::routing::{build_area, delta_rel, gamma_rel, input_label, output_label, RoutingArea};

use build::Builder;
pub use value::{is_value_net, outcome_keys, value_key, value_key_at, value_leaves};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("reference context is not stratified")]
    NotStratified,
    #[error("type {0} has no net translation")]
    Untranslatable(String),
    #[error("derivation does not fit the translation: {0}")]
    DerivationMismatch(String),
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub const OUT: &str = "out";

pub fn var_label(x: &str) -> String {
    format!("x:{x}")
}

pub fn ref_in_label(r: &str) -> String {
    format!("rin:{r}")
}

pub fn ref_out_label(r: &str) -> String {
    format!("rout:{r}")
}

/// Free ports of a translated term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetInterface {
    pub output: PortId,
    pub vars: Vec<(String, PortId)>,
    pub ref_in: BTreeMap<String, PortId>,
    pub ref_out: BTreeMap<String, PortId>,
}

#[derive(Debug, Clone)]
pub struct Translation {
    pub net: Net,
    pub iface: NetInterface,
    /// Routing areas instantiated, as (area name, reference), in construction order.
    pub areas: Vec<(&'static str, String)>,
}

/// Formula translation of types under a stratified reference context.
pub struct Types<'a> {
    regions: &'a RegionCtx,
    memo: std::cell::RefCell<HashMap<TypeExpr, Formula>>,
}

impl<'a> Types<'a> {
    pub fn new(regions: &'a RegionCtx) -> Result<Types<'a>, TranslateError> {
        check_stratified(regions).ok_or(TranslateError::NotStratified)?;
        Ok(Types { regions, memo: Default::default() })
    }

    /// `X_r`, the translation of the type stored in `r`.
    pub fn x(&self, r: &str) -> Result<Formula, TranslateError> {
        let (_, a) = self
            .regions
            .iter()
            .find(|(s, _)| s == r)
            .ok_or_else(|| TranslateError::DerivationMismatch(format!("unknown reference {r}")))?;
        self.ty(a)
    }

    /// Formula carried by the wires of reference `r`: `!X_r`.
    pub fn w(&self, r: &str) -> Result<Formula, TranslateError> {
        Ok(Formula::bang(self.x(r)?))
    }

    pub fn ty(&self, t: &TypeExpr) -> Result<Formula, TranslateError> {
        if let Some(f) = self.memo.borrow().get(t) {
            return Ok(f.clone());
        }
        let f = match t {
            TypeExpr::Unit => Formula::bang(Formula::One),
            TypeExpr::Threads(a, b) => Formula::par(self.ty(a)?, self.ty(b)?),
            TypeExpr::Arrow(a, e, b) => {
                let mut left = vec![self.ty(a)?];
                let mut right = Vec::new();
                for s in e {
                    left.push(self.w(s)?);
                    right.push(self.w(s)?);
                }
                right.push(self.ty(b)?);
                let l = fold_formula(&left, Formula::tensor);
                let r = fold_formula(&right, Formula::tensor);
                Formula::bang(Formula::lolli(l, r))
            }
            TypeExpr::Behavior | TypeExpr::Reg(..) => return Err(TranslateError::Untranslatable(t.to_string())),
        };
        self.memo.borrow_mut().insert(t.clone(), f.clone());
        Ok(f)
    }
}

fn fold_formula(fs: &[Formula], op: fn(Formula, Formula) -> Formula) -> Formula {
    let (last, init) = fs.split_last().expect("nonempty fold");
    init.iter().rev().fold(last.clone(), |acc, f| op(f.clone(), acc))
}

/// `α•` under `R`.
pub fn translate_type(t: &TypeExpr, r: &RegionCtx) -> Result<Formula, TranslateError> {
    Types::new(r)?.ty(t)
}

/// A translated subterm inside a larger net under construction.
struct Part {
    net: Net,
    out: PortId,
    vars: BTreeMap<String, PortId>,
    rin: BTreeMap<String, PortId>,
    rout: BTreeMap<String, PortId>,
}

impl Part {
    fn value(net: Net, out: PortId) -> Part {
        Part { net, out, vars: BTreeMap::new(), rin: BTreeMap::new(), rout: BTreeMap::new() }
    }
}

struct Tr<'a> {
    b: Builder,
    types: Types<'a>,
    areas: Vec<(&'static str, String)>,
}

fn mismatch<T>(msg: impl Into<String>) -> Result<T, TranslateError> {
    Err(TranslateError::DerivationMismatch(msg.into()))
}

impl Tr<'_> {
    /// Adds stubs so that the reference ports cover exactly `e`.
    fn pad(&mut self, p: &mut Part, e: &Effect) -> Result<(), TranslateError> {
        if let Some(r) = p.rin.keys().find(|r| !e.contains(*r)) {
            return mismatch(format!("reference {r} outside the effect"));
        }
        for r in e {
            if !p.rin.contains_key(r) {
                let w = self.types.w(r)?;
                let i = self.b.stub(&mut p.net, w.dual());
                let o = self.b.stub(&mut p.net, w);
                p.rin.insert(r.clone(), i);
                p.rout.insert(r.clone(), o);
            }
        }
        Ok(())
    }

    /// Moves `q` into `p`'s net, contracting shared variables.
    fn absorb_vars(&mut self, net: &mut Net, vars: &mut BTreeMap<String, PortId>, q: Part) -> Part {
        net.absorb(q.net);
        for (x, v) in q.vars {
            match vars.remove(&x) {
                Some(u) => {
                    let c = Builder::concl(net, u);
                    let j = self.b.contract(net, &c, &[u, v]);
                    vars.insert(x, j);
                }
                None => {
                    vars.insert(x, v);
                }
            }
        }
        Part { net: Net::new(), out: q.out, vars: BTreeMap::new(), rin: q.rin, rout: q.rout }
    }

    fn tr(&mut self, d: &Derivation) -> Result<Part, TranslateError> {
        let mut p = match &d.node {
            DNode::Var(x) => {
                let mut n = Net::new();
                let (out, v) = self.b.wire(&mut n, self.types.ty(&d.ty)?);
                let mut p = Part::value(n, out);
                p.vars.insert(x.clone(), v);
                p
            }
            DNode::Star => {
                let mut inner = Net::new();
                let (one, _) = self.b.gadget(&mut inner, Symbol::One, Formula::One, &[], None);
                let mut n = Net::new();
                let (bp, _) = self.b.boxed(&mut n, inner, one, &[]);
                Part::value(n, bp)
            }
            DNode::Lam(x, body) => self.lam(d, x, body)?,
            DNode::App(subst, f, a) => self.app(d, subst, f, a)?,
            DNode::Get(r) => {
                let x = self.types.x(r)?;
                let w = self.types.w(r)?;
                let mut n = Net::new();
                let (rin, aux) = self.b.gadget(&mut n, Symbol::Dereliction, w.dual(), &[x.dual()], None);
                let rout = self.b.stub(&mut n, w);
                let mut p = Part::value(n, aux[0]);
                p.rin.insert(r.clone(), rin);
                p.rout.insert(r.clone(), rout);
                p
            }
            DNode::VarSubst(sigma, m) => {
                let mut p = self.tr(m)?;
                let mut net = std::mem::take(&mut p.net);
                let mut sub_vars = BTreeMap::new();
                for (x, v) in sigma {
                    let vp = self.tr(v)?;
                    let vp = self.absorb_vars(&mut net, &mut sub_vars, vp);
                    match p.vars.remove(x) {
                        Some(hole) => Builder::plug(&mut net, vp.out, hole),
                        None => self.b.cap(&mut net, vp.out),
                    }
                }
                let rest = Part { net: Net::new(), out: p.out, vars: std::mem::take(&mut p.vars), rin: BTreeMap::new(), rout: BTreeMap::new() };
                self.absorb_vars(&mut net, &mut sub_vars, rest);
                p.net = net;
                p.vars = sub_vars;
                p
            }
            DNode::DownSubst(subst, m) | DNode::UpSubst(subst, m) => {
                let down = matches!(d.node, DNode::DownSubst(..));
                let mut p = self.tr(m)?;
                self.pad(&mut p, &d.eff)?;
                let mut net = std::mem::take(&mut p.net);
                let mut vars = std::mem::take(&mut p.vars);
                for (r, vals) in subst {
                    let w = self.types.w(r)?;
                    let mut leaves = Vec::new();
                    for v in vals {
                        let pp = self.payload(v)?;
                        leaves.push(self.absorb_vars(&mut net, &mut vars, pp).out);
                    }
                    if down {
                        let (ext, inner_end) = self.b.wire(&mut net, w.dual());
                        let mut all = vec![inner_end];
                        all.extend(leaves);
                        let merged = self.b.merge(&mut net, &w, &all);
                        let hole = p.rin.insert(r.clone(), ext).expect("padded");
                        Builder::plug(&mut net, merged, hole);
                    } else {
                        let mut all = vec![p.rout[r]];
                        all.extend(leaves);
                        let merged = self.b.merge(&mut net, &w, &all);
                        p.rout.insert(r.clone(), merged);
                    }
                }
                p.net = net;
                p.vars = vars;
                p
            }
            DNode::Par(a, b) => {
                let pa = self.tr(a)?;
                let pb = self.tr(b)?;
                let (ta, tb) = (self.types.ty(&a.ty)?, self.types.ty(&b.ty)?);
                let mut net = Net::new();
                let mut vars = BTreeMap::new();
                let pa = self.absorb_vars(&mut net, &mut vars, pa);
                let pb = self.absorb_vars(&mut net, &mut vars, pb);
                let (out, aux) = self.b.gadget(&mut net, Symbol::Par, Formula::par(ta.clone(), tb.clone()), &[ta, tb], None);
                Builder::plug(&mut net, aux[0], pa.out);
                Builder::plug(&mut net, aux[1], pb.out);
                let mut p = Part { net, out, vars, rin: BTreeMap::new(), rout: BTreeMap::new() };
                let plugs = [(pa.rin, pa.rout), (pb.rin, pb.rout)];
                self.route(&mut p, &d.eff, ("gamma", &gamma_rel()), plugs)?;
                p
            }
            DNode::Sum(_) => return mismatch("sums have no single-net translation"),
        };
        self.pad(&mut p, &d.eff)?;
        Ok(p)
    }

    /// Joins, for each reference of `e`, the given plugs through a fresh area
    /// copy; the last area plug is left open as the part's own reference ports.
    fn route<const K: usize>(
        &mut self,
        p: &mut Part,
        e: &Effect,
        (name, rel): (&'static str, &crate::multirel::Multirelation),
        mut plugs: [(BTreeMap<String, PortId>, BTreeMap<String, PortId>); K],
    ) -> Result<(), TranslateError> {
        for r in e {
            self.areas.push((name, r.clone()));
            let w = self.types.w(r)?;
            let area = build_area(&RoutingArea { rel: rel.clone(), payload: w });
            let (area, _) = area.deep_copy(&mut self.b.fresh);
            let port = |l: String| area.free_port(&l).expect("area plug");
            let ins: Vec<PortId> = (1..=K + 1).map(|k| port(input_label(&k.to_string()))).collect();
            let outs: Vec<PortId> = (1..=K + 1).map(|k| port(output_label(&k.to_string()))).collect();
            p.net.absorb(area);
            for (k, (rin, rout)) in plugs.iter_mut().enumerate() {
                match (rin.remove(r), rout.remove(r)) {
                    (Some(i), Some(o)) => {
                        Builder::plug(&mut p.net, outs[k], i);
                        Builder::plug(&mut p.net, o, ins[k]);
                    }
                    (None, None) => {
                        self.b.cap(&mut p.net, outs[k]);
                        self.b.cap(&mut p.net, ins[k]);
                    }
                    _ => return mismatch(format!("half-open reference {r}")),
                }
            }
            p.rin.insert(r.clone(), ins[K]);
            p.rout.insert(r.clone(), outs[K]);
        }
        for (rin, _) in &plugs {
            if let Some(r) = rin.keys().next() {
                return mismatch(format!("reference {r} outside the effect"));
            }
        }
        Ok(())
    }

    /// Closed-over value boxed once more: a store payload `!V•`.
    fn payload(&mut self, v: &Derivation) -> Result<Part, TranslateError> {
        let vp = self.tr(v)?;
        if !vp.rin.is_empty() {
            return mismatch("stored value with effects");
        }
        let mut net = Net::new();
        let names: Vec<String> = vp.vars.keys().cloned().collect();
        let doors: Vec<PortId> = names.iter().map(|x| vp.vars[x]).collect();
        let (bp, bd) = self.b.boxed(&mut net, vp.net, vp.out, &doors);
        let mut p = Part::value(net, bp);
        p.vars = names.into_iter().zip(bd).collect();
        Ok(p)
    }

    fn lam(&mut self, d: &Derivation, x: &str, body: &Derivation) -> Result<Part, TranslateError> {
        let TypeExpr::Arrow(a, e, _) = &d.ty else {
            return mismatch("abstraction without an arrow type");
        };
        let mut bp = self.tr(body)?;
        self.pad(&mut bp, e)?;
        let mut n = std::mem::take(&mut bp.net);
        let xp = match bp.vars.remove(x) {
            Some(p) => p,
            None => {
                let t = self.types.ty(a)?;
                self.b.stub(&mut n, t.dual())
            }
        };
        let mut left = vec![xp];
        let mut right = Vec::new();
        for s in e {
            left.push(bp.rin[s]);
            right.push(bp.rout[s]);
        }
        right.push(bp.out);
        let l = self.b.fold(&mut n, Symbol::Par, &left);
        let r = self.b.fold(&mut n, Symbol::Tensor, &right);
        let top = self.b.fold(&mut n, Symbol::Par, &[l, r]);
        let names: Vec<String> = bp.vars.keys().cloned().collect();
        let doors: Vec<PortId> = names.iter().map(|y| bp.vars[y]).collect();
        let mut outer = Net::new();
        let (out, bd) = self.b.boxed(&mut outer, n, top, &doors);
        let mut p = Part::value(outer, out);
        p.vars = names.into_iter().zip(bd).collect();
        Ok(p)
    }

    fn app(
        &mut self,
        d: &Derivation,
        subst: &[(String, Vec<Derivation>)],
        f: &Derivation,
        a: &Derivation,
    ) -> Result<Part, TranslateError> {
        let TypeExpr::Arrow(ta, e1, tb) = &f.ty else {
            return mismatch("application of a non-function");
        };
        if let Some((r, _)) = subst.iter().find(|(r, _)| !e1.contains(r)) {
            return mismatch(format!("λ-substitution on {r} outside the latent effect"));
        }
        let tf = self.types.ty(&f.ty)?;
        let phi_f = tf.unbang().unwrap().clone();
        let t_a = self.types.ty(ta)?;
        let t_b = self.types.ty(tb)?;
        let ws: Vec<Formula> = e1.iter().map(|s| self.types.w(s)).collect::<Result<_, _>>()?;

        // gate: a box with the function and the argument as doors
        let mut inner = Net::new();
        let (dm, daux) = self.b.gadget(&mut inner, Symbol::Dereliction, tf.dual(), &[phi_f.dual()], None);
        let (arg_in, dn) = self.b.wire(&mut inner, t_a.clone());
        let mut lt = vec![arg_in];
        let mut rt = Vec::new();
        let mut bi_ph = Vec::new();
        let mut bo_ph = Vec::new();
        for w in &ws {
            let (to_body, ph) = self.b.wire(&mut inner, w.clone());
            lt.push(to_body);
            bi_ph.push(ph);
            let (from_body, ph) = self.b.wire(&mut inner, w.dual());
            rt.push(from_body);
            bo_ph.push(ph);
        }
        let (ret_in, ret_ph) = self.b.wire(&mut inner, t_b.dual());
        rt.push(ret_in);
        let l = self.b.fold(&mut inner, Symbol::Tensor, &lt);
        let r = self.b.fold(&mut inner, Symbol::Par, &rt);
        let tc = self.b.fold(&mut inner, Symbol::Tensor, &[l, r]);
        Builder::plug(&mut inner, tc, daux[0]);
        let mut g = bi_ph;
        g.extend(bo_ph);
        g.push(ret_ph);
        let k = g.len();
        let gp = self.b.fold(&mut inner, Symbol::Par, &g);

        let mut net = Net::new();
        let (bp, doors) = self.b.boxed(&mut net, inner, gp, &[dm, dn]);
        let phi = Builder::concl(&net, bp).unbang().unwrap().clone();
        let (d0, d0aux) = self.b.gadget(&mut net, Symbol::Dereliction, Formula::whynot(phi.dual()), &[phi.dual()], None);
        Builder::plug(&mut net, d0, bp);
        let comps = self.b.split(&mut net, d0aux[0], k);
        let m = ws.len();

        let mut vars = BTreeMap::new();
        let fp = self.tr(f)?;
        let fp = self.absorb_vars(&mut net, &mut vars, fp);
        let ap = self.tr(a)?;
        let ap = self.absorb_vars(&mut net, &mut vars, ap);
        Builder::plug(&mut net, doors[0], fp.out);
        Builder::plug(&mut net, doors[1], ap.out);

        // body reference ports, with λ-substituted stores merged into its inputs
        let mut body_in = BTreeMap::new();
        let mut body_out = BTreeMap::new();
        for (i, s) in e1.iter().enumerate() {
            let mut leaves = Vec::new();
            if let Some((_, vals)) = subst.iter().find(|(r, _)| r == s) {
                for v in vals {
                    let pp = self.payload(v)?;
                    leaves.push(self.absorb_vars(&mut net, &mut vars, pp).out);
                }
            }
            let hole = comps[i];
            if leaves.is_empty() {
                body_in.insert(s.clone(), hole);
            } else {
                let w = &ws[i];
                let (ext, inner_end) = self.b.wire(&mut net, w.dual());
                let mut all = vec![inner_end];
                all.extend(leaves);
                let merged = self.b.merge(&mut net, w, &all);
                Builder::plug(&mut net, merged, hole);
                body_in.insert(s.clone(), ext);
            }
            body_out.insert(s.clone(), comps[m + i]);
        }
        let mut p = Part { net, out: comps[k - 1], vars, rin: BTreeMap::new(), rout: BTreeMap::new() };
        let plugs = [(fp.rin, fp.rout), (ap.rin, ap.rout), (body_in, body_out)];
        self.route(&mut p, &d.eff, ("delta", &delta_rel()), plugs)?;
        Ok(p)
    }
}

/// Translation of a derivation of `R;Γ ⊢ M : (α, e)`.
pub fn translate(r: &RegionCtx, g: &VarCtx, d: &Derivation) -> Result<Translation, TranslateError> {
    let mut t = Tr { b: Builder::new(), types: Types::new(r)?, areas: Vec::new() };
    let mut p = t.tr(d)?;
    if let Some(x) = p.vars.keys().find(|x| !g.iter().any(|(y, _)| y == *x)) {
        return Err(TranslateError::InterfaceMismatch(format!("variable {x} is not in the context")));
    }
    let mut n = std::mem::take(&mut p.net);
    let mut vars = Vec::new();
    for (i, (x, a)) in g.iter().enumerate() {
        let shadowed = g[i + 1..].iter().any(|(y, _)| y == x);
        let port = match p.vars.remove(x).filter(|_| !shadowed) {
            Some(port) => port,
            None => {
                let c = t.types.ty(a)?.dual();
                t.b.stub(&mut n, c)
            }
        };
        vars.push((x.clone(), port));
    }
    // reorder: out, variables, reference inputs, reference outputs
    let mut labelled = vec![(p.out, OUT.to_string())];
    labelled.extend(vars.iter().map(|(x, q)| (*q, var_label(x))));
    labelled.extend(p.rin.iter().map(|(r, q)| (*q, ref_in_label(r))));
    labelled.extend(p.rout.iter().map(|(r, q)| (*q, ref_out_label(r))));
    if labelled.len() != n.free_ports().len() {
        return Err(TranslateError::InterfaceMismatch("stray free ports".into()));
    }
    for (q, l) in &labelled {
        n.remove_free(*q);
        n.push_free(*q, l.clone());
    }
    let iface = NetInterface { output: p.out, vars, ref_in: p.rin, ref_out: p.rout };
    Ok(Translation { net: n, iface, areas: t.areas })
}

/// Caps every reference port: coweakenings feed the inputs, weakenings absorb the outputs.
pub fn close(t: &Translation, e: &Effect) -> Result<Net, TranslateError> {
    let have: Effect = t.iface.ref_in.keys().cloned().collect();
    if have != *e {
        return Err(TranslateError::InterfaceMismatch(format!(
            "interface references {{{}}} differ from {{{}}}",
            have.iter().cloned().collect::<Vec<_>>().join(","),
            e.iter().cloned().collect::<Vec<_>>().join(",")
        )));
    }
    let mut n = t.net.clone();
    let mut b = Builder { fresh: crate::proofnet::Fresh::above(&n) };
    for q in t.iface.ref_in.values().chain(t.iface.ref_out.values()) {
        b.cap(&mut n, *q);
    }
    Ok(n)
}

/// Reference context of a program: `partial` plus inferred types for the rest.
pub fn program_regions(partial: &RegionCtx, p: &TermA) -> Result<RegionCtx, TranslateError> {
    Ok(infer_regions(partial, p)?)
}

/// Closed net of a λ-amadio program; stores alone compile to the empty net.
pub fn compile(partial: &RegionCtx, p: &TermA) -> Result<Net, TranslateError> {
    compile_at(partial, p, None)
}

/// Type of the thread tree of `p`, `None` for stores alone.
pub fn program_type(r: &RegionCtx, p: &TermA) -> Result<Option<TypeExpr>, TranslateError> {
    let Some(m) = embed_program(r, p)? else {
        return Ok(None);
    };
    Ok(Some(typecheck_lthis(r, &VarCtx::new(), &m)?.ty))
}

/// As [`compile`], with the thread tree typed at `ty` (a supertype of its own type),
/// as a reduct is typed at the type of the program it comes from.
pub fn compile_at(partial: &RegionCtx, p: &TermA, ty: Option<&TypeExpr>) -> Result<Net, TranslateError> {
    let r = program_regions(partial, p)?;
    let Some(m) = embed_program(&r, p)? else {
        return Ok(Net::new());
    };
    let d = match ty {
        Some(t) => typecheck_lthis_at(&r, &VarCtx::new(), &m, t)?,
        None => typecheck_lthis(&r, &VarCtx::new(), &m)?,
    };
    let t = translate(&r, &VarCtx::new(), &d)?;
    close(&t, &d.eff)
}
