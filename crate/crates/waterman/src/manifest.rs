//! The parameter echo written next to every result.

use std::path::Path;

use serde::Serialize;

use crate::commands::{write_json, CliError};

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Arguments after the program name, verbatim.
    pub args: Vec<String>,
    pub seed: u64,
    /// Files written by the run, relative to the output directory.
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, args: &[String], seed: u64) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            args: args.to_vec(),
            seed,
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        write_json(&dir.join("manifest.json"), self)
    }
}
