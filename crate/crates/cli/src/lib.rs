//! Command-line front end for `keygraph-core`.

pub mod chart;
pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod table;

pub use commands::{run, Cli};
pub use error::CliError;
