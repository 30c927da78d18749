//! Transport of causal effects across domains from experiments on a
//! controllable subset of variables.

pub mod cli;
pub mod expr;
pub mod graph;
pub mod identify;
pub mod oracle;
