//! Identity-catalog driver and command-line surface for the rank-3
//! free Malcev algebra workbench.

pub mod catalog;
pub mod parser;
pub mod report;
pub mod runner;
