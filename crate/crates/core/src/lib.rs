//! Satisfiability of CTL operator fragments.
//!
//! Formulas are encoded as relational structures, measured by pathwidth and
//! temporal depth, and decided for the `{AX, EX}` fragment by evaluating a
//! depth-indexed MSO sentence on the encoding. Brute-force oracles and the
//! hardness reductions for the `AG`, `AF`/`EG` and `AU` fragments live
//! alongside.

#![no_std]

extern crate alloc;

pub mod ctl;
pub mod decomposition;
pub mod gen;
pub mod graph;
pub mod kripke;
pub mod mso;
pub mod reductions;
pub mod structure;
