//! λ-amadio, the lthis intermediate language, their type systems and an
//! exhaustive interpreter for λ-amadio.

pub mod eval;
pub mod parse;
pub mod syntax;
pub mod types;

pub use eval::{embed_lthis, embed_program, final_trees, reachable, step, step_in_place, values, EvalError, Outcome, State};
pub use parse::{parse_program, parse_region_ctx, parse_term, parse_type, ParseError};
pub use syntax::{Effect, RefSubst, RegionCtx, TermA, TermL, TypeExpr, VarCtx};
pub use types::{check_stratified, infer_regions, typecheck_amadio, typecheck_lthis, typecheck_lthis_at, DNode, Derivation, TypeError, Typing};
