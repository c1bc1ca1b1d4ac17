//! File formats and the command-line front end for `ctlfrag-core`.

pub use ctlfrag_core as core;

pub mod cli;
pub mod formats;
