//! Finite multirelations: non-negative integer matrices between labelled sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultirelError {
    #[error("label sets differ: {left:?} vs {right:?}")]
    DomainMismatch { left: Vec<String>, right: Vec<String> },
    #[error("entry ({input}, {output}) is {value}; tracing it would close a cycle")]
    CycleRisk { input: String, output: String, value: u64 },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("multiplicity overflow")]
    Overflow,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Ordered set of distinct labels. Equality ignores order.
#[derive(Debug, Clone, Default, Eq)]
pub struct LabelSet {
    labels: Vec<String>,
}

impl LabelSet {
    pub fn new<I, S>(labels: I) -> Result<Self, MultirelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for l in labels {
            let l = l.into();
            if !seen.insert(l.clone()) {
                return Err(MultirelError::DuplicateLabel(l));
            }
            out.push(l);
        }
        Ok(LabelSet { labels: out })
    }

    /// Labels `1..=n`.
    pub fn numbered(n: usize) -> Self {
        LabelSet {
            labels: (1..=n).map(|k| k.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, l: &str) -> bool {
        self.labels.iter().any(|x| x == l)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    pub fn as_slice(&self) -> &[String] {
        &self.labels
    }

    pub fn sorted(&self) -> Vec<String> {
        let mut v = self.labels.clone();
        v.sort();
        v
    }

    fn without(&self, l: &str) -> LabelSet {
        LabelSet {
            labels: self.labels.iter().filter(|x| *x != l).cloned().collect(),
        }
    }

    fn tagged(&self, tag: &str) -> LabelSet {
        LabelSet {
            labels: self.labels.iter().map(|l| format!("{tag}{l}")).collect(),
        }
    }
}

impl PartialEq for LabelSet {
    fn eq(&self, other: &Self) -> bool {
        self.sorted() == other.sorted()
    }
}

/// Arities and connection sets of every label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub input_arity: BTreeMap<String, u64>,
    pub output_arity: BTreeMap<String, u64>,
    pub input_conn: BTreeMap<String, BTreeSet<String>>,
    pub output_conn: BTreeMap<String, BTreeSet<String>>,
}

/// A map `domain × codomain → ℕ`, zero entries absent.
#[derive(Debug, Clone, Eq)]
pub struct Multirelation {
    domain: LabelSet,
    codomain: LabelSet,
    entries: BTreeMap<(String, String), u64>,
}

impl PartialEq for Multirelation {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.codomain == other.codomain
            && self.entries == other.entries
    }
}

impl Multirelation {
    pub fn zero(domain: LabelSet, codomain: LabelSet) -> Self {
        Multirelation {
            domain,
            codomain,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(labels: LabelSet) -> Self {
        let mut r = Self::zero(labels.clone(), labels.clone());
        for l in labels.iter() {
            r.entries.insert((l.to_string(), l.to_string()), 1);
        }
        r
    }

    /// Dense construction, one row per input.
    pub fn from_rows<S: AsRef<str>>(
        inputs: &[S],
        outputs: &[S],
        rows: &[Vec<u64>],
    ) -> Result<Self, MultirelError> {
        let domain = LabelSet::new(inputs.iter().map(|s| s.as_ref().to_string()))?;
        let codomain = LabelSet::new(outputs.iter().map(|s| s.as_ref().to_string()))?;
        if rows.len() != domain.len() || rows.iter().any(|r| r.len() != codomain.len()) {
            return Err(MultirelError::Parse {
                line: 0,
                reason: "row shape does not match label sets".into(),
            });
        }
        let mut r = Self::zero(domain, codomain);
        for (i, row) in rows.iter().enumerate() {
            for (o, &v) in row.iter().enumerate() {
                let (a, b) = (inputs[i].as_ref(), outputs[o].as_ref());
                r.set(a, b, v)?;
            }
        }
        Ok(r)
    }

    /// Square matrix on labels `1..=n` with `R(x,y)=1` iff `x≠y`.
    pub fn communication(n: usize) -> Self {
        let l = LabelSet::numbered(n);
        let mut r = Self::zero(l.clone(), l.clone());
        for x in l.iter() {
            for y in l.iter() {
                if x != y {
                    r.entries.insert((x.to_string(), y.to_string()), 1);
                }
            }
        }
        r
    }

    pub fn domain(&self) -> &LabelSet {
        &self.domain
    }

    pub fn codomain(&self) -> &LabelSet {
        &self.codomain
    }

    /// Non-zero entries in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.entries
            .iter()
            .map(|((a, b), v)| (a.as_str(), b.as_str(), *v))
    }

    pub fn get(&self, i: &str, o: &str) -> u64 {
        self.entries
            .get(&(i.to_string(), o.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn set(&mut self, i: &str, o: &str, v: u64) -> Result<(), MultirelError> {
        if !self.domain.contains(i) {
            return Err(MultirelError::UnknownLabel(i.into()));
        }
        if !self.codomain.contains(o) {
            return Err(MultirelError::UnknownLabel(o.into()));
        }
        let key = (i.to_string(), o.to_string());
        if v == 0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, v);
        }
        Ok(())
    }

    /// Dense rows over the lexicographically sorted label sets.
    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        let outs = self.codomain.sorted();
        self.domain
            .sorted()
            .iter()
            .map(|i| outs.iter().map(|o| self.get(i, o)).collect())
            .collect()
    }

    /// `(r ; s)(x,z) = Σ_y r(x,y)·s(y,z)`.
    pub fn compose(&self, s: &Multirelation) -> Result<Multirelation, MultirelError> {
        if self.codomain != s.domain {
            return Err(MultirelError::DomainMismatch {
                left: self.codomain.sorted(),
                right: s.domain.sorted(),
            });
        }
        let mut out = Self::zero(self.domain.clone(), s.codomain.clone());
        for ((x, y), a) in &self.entries {
            for ((y2, z), b) in s.entries.range((y.clone(), String::new())..) {
                if y2 != y {
                    break;
                }
                let prod = a.checked_mul(*b).ok_or(MultirelError::Overflow)?;
                let slot = out.entries.entry((x.clone(), z.clone())).or_insert(0);
                *slot = slot.checked_add(prod).ok_or(MultirelError::Overflow)?;
            }
        }
        Ok(out)
    }

    /// Block-diagonal sum, labels tagged `L.` and `R.`.
    pub fn coproduct(&self, s: &Multirelation) -> Multirelation {
        let mut dom = self.domain.tagged("L.");
        dom.labels.extend(s.domain.tagged("R.").labels);
        let mut cod = self.codomain.tagged("L.");
        cod.labels.extend(s.codomain.tagged("R.").labels);
        let mut out = Self::zero(dom, cod);
        for ((a, b), v) in &self.entries {
            out.entries.insert((format!("L.{a}"), format!("L.{b}")), *v);
        }
        for ((a, b), v) in &s.entries {
            out.entries.insert((format!("R.{a}"), format!("R.{b}")), *v);
        }
        out
    }

    /// Feedback of output `o` into input `i`: `T(x,y) = R(x,y) + R(x,o)·R(i,y)`.
    pub fn trace_formula(&self, i: &str, o: &str) -> Result<Multirelation, MultirelError> {
        if !self.domain.contains(i) {
            return Err(MultirelError::UnknownLabel(i.into()));
        }
        if !self.codomain.contains(o) {
            return Err(MultirelError::UnknownLabel(o.into()));
        }
        let v = self.get(i, o);
        if v != 0 {
            return Err(MultirelError::CycleRisk {
                input: i.into(),
                output: o.into(),
                value: v,
            });
        }
        let mut out = Self::zero(self.domain.without(i), self.codomain.without(o));
        for x in out.domain.clone().iter() {
            for y in out.codomain.clone().iter() {
                let via = self
                    .get(x, o)
                    .checked_mul(self.get(i, y))
                    .ok_or(MultirelError::Overflow)?;
                let t = self.get(x, y).checked_add(via).ok_or(MultirelError::Overflow)?;
                out.set(x, y, t)?;
            }
        }
        Ok(out)
    }

    pub fn profile(&self) -> Profile {
        let mut p = Profile {
            input_arity: self.domain.iter().map(|l| (l.to_string(), 0)).collect(),
            output_arity: self.codomain.iter().map(|l| (l.to_string(), 0)).collect(),
            input_conn: self
                .domain
                .iter()
                .map(|l| (l.to_string(), BTreeSet::new()))
                .collect(),
            output_conn: self
                .codomain
                .iter()
                .map(|l| (l.to_string(), BTreeSet::new()))
                .collect(),
        };
        for ((i, o), v) in &self.entries {
            *p.input_arity.get_mut(i).unwrap() += v;
            *p.output_arity.get_mut(o).unwrap() += v;
            p.input_conn.get_mut(i).unwrap().insert(o.clone());
            p.output_conn.get_mut(o).unwrap().insert(i.clone());
        }
        p
    }

    /// Pairs with non-zero multiplicity.
    pub fn support(&self) -> BTreeSet<(String, String)> {
        self.entries.keys().cloned().collect()
    }

    /// The 0/1 multirelation of a relation.
    pub fn from_relation(
        domain: LabelSet,
        codomain: LabelSet,
        pairs: &BTreeSet<(String, String)>,
    ) -> Result<Multirelation, MultirelError> {
        let mut r = Self::zero(domain, codomain);
        for (a, b) in pairs {
            r.set(a, b, 1)?;
        }
        Ok(r)
    }

    /// Pointwise `≤` on identical label sets.
    pub fn le(&self, other: &Multirelation) -> bool {
        self.domain == other.domain
            && self.codomain == other.codomain
            && self.entries.iter().all(|(k, v)| {
                other.entries.get(k).copied().unwrap_or(0) >= *v
            })
    }

    /// Rename labels through the given maps (missing keys keep their name).
    pub fn relabel(
        &self,
        fin: &BTreeMap<String, String>,
        fout: &BTreeMap<String, String>,
    ) -> Result<Multirelation, MultirelError> {
        let map = |m: &BTreeMap<String, String>, l: &str| m.get(l).cloned().unwrap_or(l.into());
        let dom = LabelSet::new(self.domain.iter().map(|l| map(fin, l)))?;
        let cod = LabelSet::new(self.codomain.iter().map(|l| map(fout, l)))?;
        let mut out = Self::zero(dom, cod);
        for ((a, b), v) in &self.entries {
            out.entries.insert((map(fin, a), map(fout, b)), *v);
        }
        Ok(out)
    }
}

impl fmt::Display for Multirelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins = self.domain.sorted();
        let outs = self.codomain.sorted();
        write!(f, "in:")?;
        for l in &ins {
            write!(f, " {l}")?;
        }
        write!(f, "\nout:")?;
        for l in &outs {
            write!(f, " {l}")?;
        }
        writeln!(f)?;
        for i in &ins {
            let row: Vec<String> = outs.iter().map(|o| self.get(i, o).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Multirelation {
    type Err = MultirelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let header = |lines: &mut dyn Iterator<Item = (usize, &str)>, key: &str| {
            let (n, l) = lines.next().ok_or(MultirelError::Parse {
                line: 0,
                reason: format!("missing `{key}:` line"),
            })?;
            let rest = l.strip_prefix(key).and_then(|r| r.strip_prefix(':')).ok_or(
                MultirelError::Parse {
                    line: n,
                    reason: format!("expected `{key}:`"),
                },
            )?;
            Ok::<_, MultirelError>(rest.split_whitespace().map(String::from).collect::<Vec<_>>())
        };
        let ins = header(&mut lines, "in")?;
        let outs = header(&mut lines, "out")?;
        let mut rows = Vec::new();
        for (n, l) in lines {
            let row = l
                .split_whitespace()
                .map(|t| {
                    t.parse::<u64>().map_err(|_| MultirelError::Parse {
                        line: n,
                        reason: format!("bad entry {t:?}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != outs.len() {
                return Err(MultirelError::Parse {
                    line: n,
                    reason: format!("expected {} entries, got {}", outs.len(), row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != ins.len() {
            return Err(MultirelError::Parse {
                line: 0,
                reason: format!("expected {} rows, got {}", ins.len(), rows.len()),
            });
        }
        Multirelation::from_rows(&ins, &outs, &rows)
    }
}
