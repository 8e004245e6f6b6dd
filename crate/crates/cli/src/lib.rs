//! Command-line front end for `locspec`: matrix files, seeded runs and
//! replayable JSON reports.
//!
//! Exit codes: 0 verdict produced, 1 verified counterexample or violation,
//! 2 usage or parse error, 3 inconclusive.

pub mod cli;
pub mod error;
pub mod io;
pub mod report;
pub mod selftest;

pub use cli::{run, Outcome};
pub use report::RunReport;
