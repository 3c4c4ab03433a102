//! File formats, configuration and subcommands of the `polsense` tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use config::ExperimentConfig;
pub use error::CliError;
