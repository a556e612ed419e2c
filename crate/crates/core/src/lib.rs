//! Differential proof-net rewriting, routing areas, and a compiler from a
//! higher-order concurrent language with regions to nets.

pub mod lang;
pub mod multirel;
pub mod proofnet;
pub mod paths;
pub mod rewrite;
pub mod routing;
pub mod translate;
pub mod verify;
