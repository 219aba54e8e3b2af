//! Command-line front end: element specifications, report writers, the
//! subcommands and the acceptance suite behind `selftest`.

pub mod acceptance;
pub mod commands;
pub mod error;
pub mod output;
pub mod spec;

pub use error::CliError;
