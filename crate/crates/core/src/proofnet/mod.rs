//! Typed port graphs for differential MELL proof nets with exponential boxes.

mod canon;
mod dot;
mod formula;
mod json;
mod net;
mod sum;
mod validate;

pub use canon::{absorb_neutral, canonical_equal, canonical_equal_nets, canonical_key, canonicalize};
pub use dot::to_dot;
pub use formula::{Formula, FormulaParseError};
pub use json::{parse, parse_net, serialize, serialize_net, ParseError};
pub use net::{Cell, CellId, Fresh, FreePort, Link, Net, PortId, Symbol, Wire};
pub use sum::NetSum;
pub use validate::{validate, Violation};
