//! Std companion to `multirank-core`: multi-threaded simulation and table
//! generation, JSON/CSV output records, and the `multirank` command line.

pub mod cli;
pub mod output;
pub mod parallel;

pub use multirank_core as engine;
