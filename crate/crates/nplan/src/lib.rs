//! Numeric planning as satisfiability modulo theories.
//!
//! Ground PDDL 2.1 (level 2) problems are unrolled to a bound `n` under
//! one of four transition-relation encodings — `standard`, `rolled`,
//! `r2e` (per-action chain variables along a fixed total order) and
//! `pattern` (multiplicity variables along an arbitrary action
//! sequence) — printed as SMT-LIB v2, handed to an external solver, and
//! the models decoded back into validated plans.

pub mod analysis;
pub mod encoders;
pub mod engine;
pub mod formula;
pub mod generate;
pub mod model;
pub mod pddl;
pub mod sexp;
