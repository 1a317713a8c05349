//! Batch front end: parse a run file, execute one command, emit CSV.

pub mod run;
pub mod spec;

pub use run::{execute, run, RunError};
pub use spec::{parse_spec, parse_with_overrides, render, RunSpec, SpecError};
