//! Replicated experiments, table and chart output, and the command-line tool.

pub mod check;
pub mod cli;
pub mod config;
pub mod experiment;
pub mod report;

pub use cli::cli_main;
pub use config::ExperimentConfig;
pub use experiment::{run_experiment, ReportRow};
pub use report::{emit_are_svg, emit_csv, emit_sd_svg};
