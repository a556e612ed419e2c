//! JSON interchange for net sums.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Cell, Formula, FreePort, Link, Net, NetSum, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    /// Byte offset into the input; 0 when the fault is not tied to one token.
    pub offset: usize,
    pub reason: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.offset, self.reason)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SumDoc {
    sum: Vec<NetDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetDoc {
    free: Vec<FreeDoc>,
    cells: Vec<CellDoc>,
    wires: Vec<WireDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FreeDoc {
    port: u32,
    label: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellDoc {
    id: u32,
    sym: String,
    pal: u32,
    aux: Vec<u32>,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    inner: Option<Box<NetDoc>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireDoc {
    a: u32,
    b: u32,
    ty: String,
    dir: String,
}

fn net_doc(n: &Net) -> NetDoc {
    NetDoc {
        free: n
            .free
            .iter()
            .map(|f| FreeDoc {
                port: f.port,
                label: f.label.clone(),
            })
            .collect(),
        cells: n
            .cells
            .values()
            .map(|c| CellDoc {
                id: c.id,
                sym: c.symbol.name().to_string(),
                pal: c.principal,
                aux: c.aux.clone(),
                inner: c.inner.as_deref().map(|i| Box::new(net_doc(i))),
            })
            .collect(),
        wires: n
            .wires()
            .into_iter()
            .map(|w| WireDoc {
                a: w.a,
                b: w.b,
                ty: w.ty.to_string(),
                dir: "ab".into(),
            })
            .collect(),
    }
}

/// Compact JSON for a sum; summands in canonical-key order.
pub fn serialize(s: &NetSum) -> String {
    let doc = SumDoc {
        sum: s.nets().map(net_doc).collect(),
    };
    serde_json::to_string(&doc).expect("serializable")
}

/// JSON for a single net as a one-summand sum.
pub fn serialize_net(n: &Net) -> String {
    let doc = SumDoc { sum: vec![net_doc(n)] };
    serde_json::to_string(&doc).expect("serializable")
}

fn at(offset: usize, reason: impl Into<String>) -> ParseError {
    ParseError {
        offset,
        reason: reason.into(),
    }
}

fn offset_of(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn find(text: &str, needle: &str) -> usize {
    text.find(needle).unwrap_or(0)
}

fn build(doc: NetDoc, text: &str, ids: &mut HashSet<u32>) -> Result<Net, ParseError> {
    let mut n = Net::new();
    let mut claim = |id: u32, what: &str| -> Result<(), ParseError> {
        if ids.insert(id) {
            Ok(())
        } else {
            Err(at(find(text, &id.to_string()), format!("duplicate id {id} ({what})")))
        }
    };
    for f in &doc.free {
        claim(f.port, "free port")?;
    }
    for c in &doc.cells {
        claim(c.id, "cell")?;
        claim(c.pal, "port")?;
        for p in &c.aux {
            claim(*p, "port")?;
        }
    }
    for f in doc.free {
        n.free.push(FreePort {
            port: f.port,
            label: f.label,
        });
    }
    for c in doc.cells {
        let symbol = Symbol::from_name(&c.sym)
            .ok_or_else(|| at(find(text, &format!("\"{}\"", c.sym)), format!("unknown symbol {:?}", c.sym)))?;
        let inner = match c.inner {
            Some(d) => Some(Box::new(build(*d, text, ids)?)),
            None => None,
        };
        if symbol == Symbol::Box && inner.is_none() {
            return Err(at(0, format!("box cell {} without inner net", c.id)));
        }
        if symbol != Symbol::Box && inner.is_some() {
            return Err(at(0, format!("cell {} of kind {} has an inner net", c.id, symbol)));
        }
        n.insert_cell(Cell {
            id: c.id,
            symbol,
            principal: c.pal,
            aux: c.aux,
            inner,
        });
    }
    let mut links: BTreeMap<u32, Link> = BTreeMap::new();
    for w in doc.wires {
        let ty: Formula = w
            .ty
            .parse()
            .map_err(|e| at(find(text, &format!("\"{}\"", w.ty)), format!("bad formula {:?}: {e}", w.ty)))?;
        let ty = match w.dir.as_str() {
            "ab" => ty,
            "ba" => ty.dual(),
            d => return Err(at(find(text, &format!("\"{d}\"")), format!("bad dir {d:?}"))),
        };
        if w.a == w.b {
            return Err(at(0, format!("wire from port {} to itself", w.a)));
        }
        for p in [w.a, w.b] {
            if links.contains_key(&p) {
                return Err(at(0, format!("port {p} wired twice")));
            }
        }
        links.insert(
            w.b,
            Link {
                peer: w.a,
                ty: ty.dual(),
            },
        );
        links.insert(w.a, Link { peer: w.b, ty });
    }
    n.links = links;
    Ok(n)
}

/// Parses a sum document; ids must be unique within each summand, boxes included.
pub fn parse(text: &str) -> Result<NetSum, ParseError> {
    let doc: SumDoc =
        serde_json::from_str(text).map_err(|e| at(offset_of(text, e.line(), e.column()), e.to_string()))?;
    let mut s = NetSum::zero();
    for d in doc.sum {
        let mut ids = HashSet::new();
        s.push(build(d, text, &mut ids)?);
    }
    Ok(s)
}

/// Parses a document that must hold exactly one summand.
pub fn parse_net(text: &str) -> Result<Net, ParseError> {
    let doc: SumDoc =
        serde_json::from_str(text).map_err(|e| at(offset_of(text, e.line(), e.column()), e.to_string()))?;
    if doc.sum.len() != 1 {
        return Err(at(0, format!("expected one summand, found {}", doc.sum.len())));
    }
    let mut ids = HashSet::new();
    build(doc.sum.into_iter().next().unwrap(), text, &mut ids)
}
