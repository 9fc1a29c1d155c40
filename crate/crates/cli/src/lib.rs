//! Command-line front end: run configuration, verification suites and reports.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

pub use commands::{execute, Cli, Command};
pub use config::{OutputFormat, RunConfig};
pub use report::{Check, SuiteReport};
pub use suites::{run_suite, SUITES};
