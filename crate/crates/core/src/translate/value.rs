//! Reading program outcomes off normal forms.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::lang::{embed_program, final_trees, typecheck_lthis, DNode, Derivation, RegionCtx, TermA, TermL, TypeExpr, VarCtx};
use crate::proofnet::{CellId, Fresh, Net, NetSum, Symbol};
use crate::rewrite::{deep_normalize, RewriteError};

use super::{close, translate, TranslateError, OUT};

/// Thread values of a closed net: the components hanging off the `⅋` tree at
/// `out`, each as a net with the single free port `out`. `None` if the net has
/// another shape, if components share cells, or if some cell lies outside them.
pub fn value_leaves(n: &Net) -> Option<Vec<Net>> {
    if n.free_ports().len() != 1 {
        return None;
    }
    let out = n.free_port(OUT)?;
    let mut tree = HashSet::new();
    let mut starts = Vec::new();
    let mut stack = vec![n.peer(out)?];
    while let Some(q) = stack.pop() {
        match n.owner(q) {
            Some((c, 0)) if n.cell(c)?.symbol == Symbol::Par => {
                tree.insert(c);
                for a in n.cell(c)?.aux.iter().rev() {
                    stack.push(n.peer(*a)?);
                }
            }
            _ => starts.push(q),
        }
    }
    let mut used: HashSet<CellId> = tree.clone();
    let mut leaves = Vec::new();
    for q in starts {
        let (root, _) = n.owner(q)?;
        let mut comp = BTreeSet::new();
        let mut todo = vec![root];
        while let Some(c) = todo.pop() {
            if tree.contains(&c) || !comp.insert(c) {
                continue;
            }
            for p in n.cell(c)?.ports() {
                let peer = n.peer(p)?;
                if p == q {
                    continue;
                }
                let (d, _) = n.owner(peer)?;
                if tree.contains(&d) {
                    return None;
                }
                todo.push(d);
            }
        }
        let mut leaf = Net::new();
        for c in &comp {
            if !used.insert(*c) {
                return None;
            }
            let cell = n.cell(*c)?.clone();
            for p in cell.ports() {
                if p != q {
                    let l = n.link(p)?;
                    leaf.connect(p, l.peer, l.ty.clone());
                }
            }
            leaf.insert_cell(cell);
        }
        let ty = n.ty_out(q)?.clone();
        let f = leaf.add_free(&mut Fresh::above(n), OUT);
        leaf.connect(q, f, ty);
        leaves.push(leaf);
    }
    if used.len() != n.cell_count() {
        return None;
    }
    Some(leaves)
}

/// True if every thread component of `n` is a closed box, the shape of a value.
pub fn is_value_net(n: &Net) -> bool {
    value_leaves(n).is_some_and(|ls| {
        ls.iter().all(|l| {
            let p = l.peer(l.free_port(OUT).unwrap()).unwrap();
            l.owner_cell(p).is_some_and(|c| c.symbol == Symbol::Box && c.aux.is_empty())
        })
    })
}

/// Sorted keys of the thread values of a value net, each taken up to deep normalization.
pub fn value_key(n: &Net, budget: usize) -> Result<Option<Vec<String>>, RewriteError> {
    let Some(leaves) = value_leaves(n) else {
        return Ok(None);
    };
    let mut keys = Vec::new();
    for l in leaves {
        let nf = deep_normalize(&NetSum::single(l), budget)?;
        let [k] = nf.keys()[..] else {
            return Ok(None);
        };
        keys.push(k.to_string());
    }
    keys.sort();
    Ok(Some(keys))
}

/// Keys, comparable with `value_key`, of the terminated runs of `p`. Each final
/// thread is compiled at the type its source thread has in `p`, so values read
/// from stores keep the latent effects of the store type.
pub fn outcome_keys(r: &RegionCtx, p: &TermA, budget: usize) -> Result<BTreeSet<Vec<String>>, TranslateError> {
    let mut out = BTreeSet::new();
    let Some(m) = embed_program(r, p)? else {
        return Ok(out);
    };
    let d = typecheck_lthis(r, &VarCtx::new(), &m)?;
    for t in final_trees(p, budget)? {
        let mut keys = Vec::new();
        tree_keys(r, &d, &t, budget, &mut keys)?;
        keys.sort();
        out.insert(keys);
    }
    Ok(out)
}

fn tree_keys(r: &RegionCtx, d: &Derivation, t: &TermA, budget: usize, keys: &mut Vec<String>) -> Result<(), TranslateError> {
    match (&d.node, t) {
        (DNode::Par(a, b), TermA::Par(x, y)) => {
            tree_keys(r, a, x, budget, keys)?;
            tree_keys(r, b, y, budget, keys)
        }
        _ => typed_keys(r, &d.ty, t, budget, keys),
    }
}

fn typed_keys(r: &RegionCtx, ty: &TypeExpr, t: &TermA, budget: usize, keys: &mut Vec<String>) -> Result<(), TranslateError> {
    match (ty, t) {
        (TypeExpr::Threads(a, b), TermA::Par(x, y)) => {
            typed_keys(r, a, x, budget, keys)?;
            typed_keys(r, b, y, budget, keys)
        }
        _ => {
            keys.push(value_key_at(r, t, ty, budget)?);
            Ok(())
        }
    }
}

/// Deep normal form key of value `v` translated at type `ty`. The typing is
/// obtained by storing `v` in a scratch reference of type `ty`.
pub fn value_key_at(r: &RegionCtx, v: &TermA, ty: &TypeExpr, budget: usize) -> Result<String, TranslateError> {
    let scratch = "%value".to_string();
    let mut wide = r.clone();
    wide.push((scratch.clone(), ty.clone()));
    let vl = TermL::from_amadio(v)
        .filter(TermL::is_value)
        .ok_or_else(|| TranslateError::DerivationMismatch(format!("{v} is not a value")))?;
    let probe = TermL::UpSubst(BTreeMap::from([(scratch, vec![vl])]), Box::new(TermL::Star));
    let d = typecheck_lthis(&wide, &VarCtx::new(), &probe)?;
    let DNode::UpSubst(s, _) = &d.node else {
        return Err(TranslateError::DerivationMismatch("unexpected probe derivation".into()));
    };
    let dv = &s[0].1[0];
    let t = translate(r, &VarCtx::new(), dv)?;
    let n = close(&t, &dv.eff)?;
    let nf = deep_normalize(&NetSum::single(n), budget).map_err(|e| TranslateError::DerivationMismatch(e.to_string()))?;
    match nf.keys()[..] {
        [k] => Ok(k.to_string()),
        _ => Err(TranslateError::DerivationMismatch(format!("value {v} normalizes to a sum"))),
    }
}
