//! rewire: a gate-level netlist rewriting toolkit built on an
//! equality-saturation engine.
//!
//! The crate provides a strict netlist data model with JSON and s-expression
//! formats, an e-graph with pattern e-matching and a saturation runner,
//! greedy and exact ILP extraction, and four passes built on top of them:
//! register retiming (minimum-register and source-directed), standard-library
//! component identification, library learning by anti-unification, and
//! hardware loop rerolling. A brute-force simulation oracle referees every
//! pass.

pub mod egraph;
pub mod extract;
pub mod identify;
pub mod learn;
pub mod netlist;
pub mod oracle;
pub mod reroll;
pub mod retime;
pub mod sexpr;
pub mod term;
