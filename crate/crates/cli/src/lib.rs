//! Command-line front end: end-to-end decompositions, bound validation and
//! the reference experiment, with every result written as CSV or JSON.

pub mod commands;
pub mod config;

pub use commands::{Pipeline, cmd_decompose, cmd_reproduce_paper, cmd_validate, exit_code, run_pipeline};
pub use config::{FunctionSpec, RunArgs, RunConfig};
