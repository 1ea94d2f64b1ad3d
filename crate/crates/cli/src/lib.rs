//! Library side of the `proca` command: configuration, artifact writers and
//! the three subcommands.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{analyze, run, sweep};
pub use config::{Overrides, RunConfig};
