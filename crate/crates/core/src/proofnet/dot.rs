//! Graphviz rendering.

use std::fmt::Write;

use super::{Net, Symbol};

fn glyph(s: Symbol) -> &'static str {
    match s {
        Symbol::One => "1",
        Symbol::Tensor => "⊗",
        Symbol::Par => "⅋",
        Symbol::Dereliction => "?d",
        Symbol::Contraction => "?c",
        Symbol::Weakening => "?w",
        Symbol::Cocontraction => "!c",
        Symbol::Coweakening => "!w",
        Symbol::Box => "!",
    }
}

/// Graphviz digraph; boxes become nested clusters, wires are edges from the smaller port.
pub fn to_dot(n: &Net) -> String {
    let mut out = String::from("digraph net {\n  node [shape=circle];\n");
    let mut path = Vec::new();
    emit(n, &mut path, 1, &mut out);
    out.push_str("}\n");
    out
}

fn node_of(n: &Net, prefix: &str, p: u32) -> String {
    match n.owner(p) {
        Some((c, _)) => format!("\"{prefix}c{c}\""),
        None => format!("\"{prefix}p{p}\""),
    }
}

fn emit(n: &Net, path: &mut Vec<u32>, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    let prefix: String = path.iter().map(|b| format!("b{b}.")).collect();
    for f in &n.free {
        let _ = writeln!(
            out,
            "{pad}\"{prefix}p{}\" [shape=plaintext, label=\"{}\"];",
            f.port,
            f.label.replace('"', "\\\"")
        );
    }
    for c in n.cells.values() {
        if let (Symbol::Box, Some(inner)) = (c.symbol, c.inner.as_deref()) {
            let _ = writeln!(out, "{pad}subgraph \"cluster_{prefix}b{}\" {{", c.id);
            let _ = writeln!(out, "{pad}  label=\"box {}\";", c.id);
            let _ = writeln!(out, "{pad}  \"{prefix}c{}\" [shape=box, label=\"!\"];", c.id);
            path.push(c.id);
            emit(inner, path, indent + 1, out);
            path.pop();
            let _ = writeln!(out, "{pad}}}");
        } else {
            let _ = writeln!(out, "{pad}\"{prefix}c{}\" [label=\"{}\"];", c.id, glyph(c.symbol));
        }
    }
    for w in n.wires() {
        let _ = writeln!(
            out,
            "{pad}{} -> {} [label=\"{}\"];",
            node_of(n, &prefix, w.a),
            node_of(n, &prefix, w.b),
            w.ty
        );
    }
}
