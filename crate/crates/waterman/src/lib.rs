//! File formats, the function registry and the subcommands of the
//! `waterman` binary. All numerics live in `waterman-core`.

pub mod cli;
pub mod commands;
pub mod manifest;
pub mod real;
pub mod registry;
pub mod specfile;

pub use commands::CliError;
