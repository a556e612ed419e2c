//! Terms of λ-amadio and lthis, their types, and printers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A λ-amadio term or program.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermA {
    Var(String),
    Star,
    Lam(String, Box<TermA>),
    App(Box<TermA>, Box<TermA>),
    Get(String),
    /// `set(r, V)`; the payload is a value.
    Set(String, Box<TermA>),
    Par(Box<TermA>, Box<TermA>),
    /// `r ⇐ V`; the payload is a value.
    Store(String, Box<TermA>),
}

impl TermA {
    pub fn var(x: &str) -> TermA {
        TermA::Var(x.to_string())
    }

    pub fn lam(x: &str, body: TermA) -> TermA {
        TermA::Lam(x.to_string(), Box::new(body))
    }

    pub fn app(f: TermA, a: TermA) -> TermA {
        TermA::App(Box::new(f), Box::new(a))
    }

    pub fn get(r: &str) -> TermA {
        TermA::Get(r.to_string())
    }

    pub fn set(r: &str, v: TermA) -> TermA {
        TermA::Set(r.to_string(), Box::new(v))
    }

    pub fn par(a: TermA, b: TermA) -> TermA {
        TermA::Par(Box::new(a), Box::new(b))
    }

    pub fn store(r: &str, v: TermA) -> TermA {
        TermA::Store(r.to_string(), Box::new(v))
    }

    /// Left-nested parallel composition; `None` when empty.
    pub fn par_all(ts: impl IntoIterator<Item = TermA>) -> Option<TermA> {
        ts.into_iter().reduce(TermA::par)
    }

    pub fn is_value(&self) -> bool {
        matches!(self, TermA::Var(_) | TermA::Star | TermA::Lam(..))
    }

    /// Free variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            TermA::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            TermA::Star | TermA::Get(_) => {}
            TermA::Lam(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            TermA::App(a, b) | TermA::Par(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            TermA::Set(_, v) | TermA::Store(_, v) => v.collect_free(bound, out),
        }
    }

    /// References read or written anywhere in the term.
    pub fn references(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| match t {
            TermA::Get(r) | TermA::Set(r, _) | TermA::Store(r, _) => {
                out.insert(r.clone());
            }
            _ => {}
        });
        out
    }

    fn walk(&self, f: &mut dyn FnMut(&TermA)) {
        f(self);
        match self {
            TermA::Var(_) | TermA::Star | TermA::Get(_) => {}
            TermA::Lam(_, b) | TermA::Set(_, b) | TermA::Store(_, b) => b.walk(f),
            TermA::App(a, b) | TermA::Par(a, b) => {
                a.walk(f);
                b.walk(f);
            }
        }
    }

    /// Capture-avoiding substitution `self[v/x]`.
    pub fn subst(&self, x: &str, v: &TermA) -> TermA {
        let fv = v.free_vars();
        self.subst_with(x, v, &fv)
    }

    fn subst_with(&self, x: &str, v: &TermA, fv: &BTreeSet<String>) -> TermA {
        match self {
            TermA::Var(y) if y == x => v.clone(),
            TermA::Var(_) | TermA::Star | TermA::Get(_) => self.clone(),
            TermA::Lam(y, _) if y == x => self.clone(),
            TermA::Lam(y, b) => {
                if fv.contains(y) {
                    let mut avoid = fv.clone();
                    avoid.extend(b.free_vars());
                    avoid.insert(x.to_string());
                    let z = fresh_name(y, &avoid);
                    let b = b.subst(y, &TermA::Var(z.clone()));
                    TermA::Lam(z, Box::new(b.subst_with(x, v, fv)))
                } else {
                    TermA::Lam(y.clone(), Box::new(b.subst_with(x, v, fv)))
                }
            }
            TermA::App(a, b) => TermA::app(a.subst_with(x, v, fv), b.subst_with(x, v, fv)),
            TermA::Par(a, b) => TermA::par(a.subst_with(x, v, fv), b.subst_with(x, v, fv)),
            TermA::Set(r, w) => TermA::Set(r.clone(), Box::new(w.subst_with(x, v, fv))),
            TermA::Store(r, w) => TermA::Store(r.clone(), Box::new(w.subst_with(x, v, fv))),
        }
    }

    /// Printed form with bound variables renamed by binding depth; equal iff α-equivalent.
    pub fn alpha_key(&self) -> String {
        self.canonical_names(&mut Vec::new()).to_string()
    }

    fn canonical_names(&self, bound: &mut Vec<(String, String)>) -> TermA {
        match self {
            TermA::Var(x) => match bound.iter().rev().find(|(y, _)| y == x) {
                Some((_, z)) => TermA::Var(z.clone()),
                None => self.clone(),
            },
            TermA::Star | TermA::Get(_) => self.clone(),
            TermA::Lam(x, b) => {
                let z = format!("%{}", bound.len());
                bound.push((x.clone(), z.clone()));
                let b = b.canonical_names(bound);
                bound.pop();
                TermA::Lam(z, Box::new(b))
            }
            TermA::App(a, b) => TermA::app(a.canonical_names(bound), b.canonical_names(bound)),
            TermA::Par(a, b) => TermA::par(a.canonical_names(bound), b.canonical_names(bound)),
            TermA::Set(r, v) => TermA::Set(r.clone(), Box::new(v.canonical_names(bound))),
            TermA::Store(r, v) => TermA::Store(r.clone(), Box::new(v.canonical_names(bound))),
        }
    }

    /// Top-level components of the `∥` tree, left to right.
    /// The thread tree with its stores removed, shape otherwise kept; `None` if only stores remain.
    pub fn without_stores(&self) -> Option<TermA> {
        match self {
            TermA::Store(..) => None,
            TermA::Par(a, b) => match (a.without_stores(), b.without_stores()) {
                (Some(a), Some(b)) => Some(TermA::par(a, b)),
                (a, b) => a.or(b),
            },
            t => Some(t.clone()),
        }
    }

    pub fn threads(&self) -> Vec<&TermA> {
        match self {
            TermA::Par(a, b) => {
                let mut v = a.threads();
                v.extend(b.threads());
                v
            }
            t => vec![t],
        }
    }
}

/// `base` primed until it avoids `avoid`.
pub(crate) fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut z = format!("{base}'");
    while avoid.contains(&z) {
        z.push('\'');
    }
    z
}

/// Reference substitution 𝒱: each reference to a finite multiset of values.
pub type RefSubst = BTreeMap<String, Vec<TermL>>;

/// Term of the explicit-substitution intermediate language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermL {
    Var(String),
    Star,
    Lam(String, Box<TermL>),
    /// `⟨𝒱⟩λ(M N)`; plain application when 𝒱 is empty.
    App(RefSubst, Box<TermL>, Box<TermL>),
    Get(String),
    /// `⟨σ⟩M`.
    VarSubst(BTreeMap<String, TermL>, Box<TermL>),
    /// `⟨𝒱⟩↓M`.
    DownSubst(RefSubst, Box<TermL>),
    /// `⟨𝒱⟩↑M`.
    UpSubst(RefSubst, Box<TermL>),
    Par(Box<TermL>, Box<TermL>),
    Sum(Vec<TermL>),
}

impl TermL {
    pub fn is_value(&self) -> bool {
        matches!(self, TermL::Var(_) | TermL::Star | TermL::Lam(..))
    }

    pub fn app(f: TermL, a: TermL) -> TermL {
        TermL::App(RefSubst::new(), Box::new(f), Box::new(a))
    }

    /// Plain translation: `set(r, V)` becomes `⟨r ↦ [V]⟩↑ ∗`, no other substitution is added.
    /// Stores have no counterpart and are rejected.
    pub fn from_amadio(t: &TermA) -> Option<TermL> {
        Some(match t {
            TermA::Var(x) => TermL::Var(x.clone()),
            TermA::Star => TermL::Star,
            TermA::Lam(x, b) => TermL::Lam(x.clone(), Box::new(TermL::from_amadio(b)?)),
            TermA::App(a, b) => TermL::app(TermL::from_amadio(a)?, TermL::from_amadio(b)?),
            TermA::Get(r) => TermL::Get(r.clone()),
            TermA::Set(r, v) => {
                let mut s = RefSubst::new();
                s.insert(r.clone(), vec![TermL::from_amadio(v)?]);
                TermL::UpSubst(s, Box::new(TermL::Star))
            }
            TermA::Par(a, b) => TermL::Par(Box::new(TermL::from_amadio(a)?), Box::new(TermL::from_amadio(b)?)),
            TermA::Store(..) => return None,
        })
    }

    /// Value forms back to λ-amadio; `None` on any explicit substitution.
    pub fn to_amadio(&self) -> Option<TermA> {
        Some(match self {
            TermL::Var(x) => TermA::Var(x.clone()),
            TermL::Star => TermA::Star,
            TermL::Lam(x, b) => TermA::Lam(x.clone(), Box::new(b.to_amadio()?)),
            TermL::App(s, a, b) if s.is_empty() => TermA::app(a.to_amadio()?, b.to_amadio()?),
            TermL::Get(r) => TermA::Get(r.clone()),
            TermL::UpSubst(s, m) if **m == TermL::Star && s.len() == 1 => {
                let (r, vs) = s.iter().next().unwrap();
                match vs.as_slice() {
                    [v] => TermA::set(r, v.to_amadio()?),
                    _ => return None,
                }
            }
            TermL::Par(a, b) => TermA::par(a.to_amadio()?, b.to_amadio()?),
            _ => return None,
        })
    }
}

pub type Effect = BTreeSet<String>;

/// Type of the source languages. `Threads` is 𝐁 with the thread types it was built from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    Unit,
    Behavior,
    Threads(Box<TypeExpr>, Box<TypeExpr>),
    Arrow(Box<TypeExpr>, Effect, Box<TypeExpr>),
    Reg(String, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn arrow(a: TypeExpr, e: &[&str], b: TypeExpr) -> TypeExpr {
        TypeExpr::Arrow(Box::new(a), e.iter().map(|s| s.to_string()).collect(), Box::new(b))
    }

    pub fn is_behavior(&self) -> bool {
        matches!(self, TypeExpr::Behavior | TypeExpr::Threads(..))
    }

    /// References occurring in latent effects.
    pub fn eff(&self) -> Effect {
        let mut out = Effect::new();
        self.collect_eff(&mut out);
        out
    }

    fn collect_eff(&self, out: &mut Effect) {
        match self {
            TypeExpr::Unit | TypeExpr::Behavior => {}
            TypeExpr::Threads(a, b) => {
                a.collect_eff(out);
                b.collect_eff(out);
            }
            TypeExpr::Arrow(a, e, b) => {
                a.collect_eff(out);
                out.extend(e.iter().cloned());
                b.collect_eff(out);
            }
            TypeExpr::Reg(_, a) => a.collect_eff(out),
        }
    }

    /// References named by `Reg` anywhere in the type.
    pub(crate) fn regions(&self, out: &mut Effect) {
        match self {
            TypeExpr::Unit | TypeExpr::Behavior => {}
            TypeExpr::Threads(a, b) | TypeExpr::Arrow(a, _, b) => {
                a.regions(out);
                b.regions(out);
            }
            TypeExpr::Reg(r, a) => {
                out.insert(r.clone());
                a.regions(out);
            }
        }
    }

    /// 𝐁 forgets its thread shape.
    pub fn erase_threads(&self) -> TypeExpr {
        match self {
            TypeExpr::Threads(..) => TypeExpr::Behavior,
            TypeExpr::Arrow(a, e, b) => TypeExpr::Arrow(Box::new(a.erase_threads()), e.clone(), Box::new(b.erase_threads())),
            TypeExpr::Reg(r, a) => TypeExpr::Reg(r.clone(), Box::new(a.erase_threads())),
            t => t.clone(),
        }
    }
}

/// Ordered reference context `r₁ : A₁, …`.
pub type RegionCtx = Vec<(String, TypeExpr)>;
/// Ordered variable context `x₁ : A₁, …`.
pub type VarCtx = Vec<(String, TypeExpr)>;

pub fn lookup<'a>(ctx: &'a [(String, TypeExpr)], name: &str) -> Option<&'a TypeExpr> {
    ctx.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
}

fn fmt_effect(e: &Effect) -> String {
    e.iter().cloned().collect::<Vec<_>>().join(",")
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atom = |t: &TypeExpr| match t {
            TypeExpr::Arrow(..) | TypeExpr::Reg(..) => format!("({t})"),
            t => t.to_string(),
        };
        match self {
            TypeExpr::Unit => write!(f, "Unit"),
            TypeExpr::Behavior | TypeExpr::Threads(..) => write!(f, "B"),
            TypeExpr::Arrow(a, e, b) if e.is_empty() => write!(f, "{} -> {b}", atom(a)),
            TypeExpr::Arrow(a, e, b) => write!(f, "{} -{{{}}}> {b}", atom(a), fmt_effect(e)),
            TypeExpr::Reg(r, a) => write!(f, "Reg {r} {}", atom(a)),
        }
    }
}

/// Printing precedence: 0 parallel, 1 binder, 2 application, 3 atom.
fn show_a(t: &TermA, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mine = match t {
        TermA::Par(..) => 0,
        TermA::Lam(..) | TermA::Store(..) | TermA::Set(..) | TermA::Get(_) => 1,
        TermA::App(..) => 2,
        TermA::Var(_) | TermA::Star => 3,
    };
    if mine < prec {
        write!(f, "(")?;
    }
    match t {
        TermA::Var(x) => write!(f, "{x}")?,
        TermA::Star => write!(f, "*")?,
        TermA::Lam(x, b) => {
            write!(f, "\\{x}. ")?;
            show_a(b, 0, f)?;
        }
        TermA::App(a, b) => {
            show_a(a, 2, f)?;
            write!(f, " ")?;
            show_a(b, 3, f)?;
        }
        TermA::Get(r) => write!(f, "get {r}")?,
        TermA::Set(r, v) => {
            write!(f, "set {r} ")?;
            show_a(v, 3, f)?;
        }
        TermA::Par(a, b) => {
            // a bare lambda would swallow the rest of the composition
            let lam = |t: &TermA| if matches!(t, TermA::Lam(..)) { 2 } else { 0 };
            show_a(a, lam(a), f)?;
            write!(f, " || ")?;
            show_a(b, lam(b).max(1), f)?;
        }
        TermA::Store(r, v) => {
            write!(f, "{r} <= ")?;
            show_a(v, 3, f)?;
        }
    }
    if mine < prec {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for TermA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        show_a(self, 0, f)
    }
}

fn show_subst(s: &RefSubst) -> String {
    let parts: Vec<String> = s
        .iter()
        .map(|(r, vs)| {
            let vs: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
            format!("{r} := [{}]", vs.join(", "))
        })
        .collect();
    parts.join("; ")
}

impl fmt::Display for TermL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atom = |t: &TermL| match t {
            TermL::Var(_) | TermL::Star => t.to_string(),
            t => format!("({t})"),
        };
        match self {
            TermL::Var(x) => write!(f, "{x}"),
            TermL::Star => write!(f, "*"),
            TermL::Lam(x, b) => write!(f, "\\{x}. {b}"),
            TermL::App(s, a, b) if s.is_empty() => {
                let head = match **a {
                    TermL::App(..) => a.to_string(),
                    _ => atom(a),
                };
                write!(f, "{head} {}", atom(b))
            }
            TermL::App(s, a, b) => write!(f, "<{}>lam({} {})", show_subst(s), atom(a), atom(b)),
            TermL::Get(r) => write!(f, "get {r}"),
            TermL::VarSubst(s, m) => {
                let parts: Vec<String> = s.iter().map(|(x, v)| format!("{x} := {v}")).collect();
                write!(f, "{{{}}}{}", parts.join("; "), atom(m))
            }
            TermL::DownSubst(s, m) => write!(f, "<{}>down {}", show_subst(s), atom(m)),
            TermL::UpSubst(s, m) => write!(f, "<{}>up {}", show_subst(s), atom(m)),
            TermL::Par(a, b) => write!(f, "{a} || {}", atom(b)),
            TermL::Sum(ms) => {
                let parts: Vec<String> = ms.iter().map(atom).collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}
