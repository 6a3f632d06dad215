//! Core of the smart car-park environment.
//!
//! Everything in this crate is pure and allocation-only (`no_std` + `alloc`):
//!
//! - [`formula`] / [`syntax`]: the propositional linear temporal logic fragment,
//!   its ASCII surface syntax and negation normal form.
//! - [`tableau`]: the semantic-tableaux decision procedure and truth trees.
//! - [`oracle`]: an independent lasso-trace satisfiability checker used to
//!   validate the tableau.
//! - [`graph`]: labelled/attributed digraphs and the parking world built on them.
//! - [`knowledge`]: presence events and the per-user specification store.
//! - [`agents`] / [`runtime`]: node, follower and decision agents plus the
//!   deterministic dispatcher that drives them from a presence trace.
#![no_std]

extern crate alloc;

pub mod agents;
pub mod formula;
pub mod graph;
pub mod knowledge;
pub mod oracle;
pub mod runtime;
pub mod syntax;
pub mod tableau;
pub mod time;

pub use formula::Formula;
pub use syntax::{parse, render, ParseError};
pub use tableau::{decide, default_depth, is_valid, render_tree, TableauError, TableauResult, Verdict};
