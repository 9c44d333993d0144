//! Instance generation, benchmarking and the command-line front end for
//! `tcgre-core`.

pub mod cli;
pub mod generator;
pub mod report;
pub mod runner;
