//! Argument parsing and exit codes.

use clap::{Parser, Subcommand};

use crate::commands::{self, CliError, ConvergeArgs, CounterexampleCommand, KernelArgs, VariationArgs};

#[derive(Parser, Debug)]
#[command(name = "waterman", version, about = "Cesaro kernels, Waterman variations and the diagonal counterexample")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate K_n^α on (0, π] with its normalization and remainder bound.
    Kernel(KernelArgs),
    /// Λ-variation of a registry function on a grid, with its witness.
    Variation(VariationArgs),
    /// Cesàro means along a schedule of n and their error against f*.
    Converge(ConvergeArgs),
    /// Build or verify the staged counterexample.
    #[command(subcommand)]
    Counterexample(CounterexampleCommand),
}

/// Caps the rayon pool at `WATERMAN_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("WATERMAN_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("WATERMAN_THREADS must be a positive integer, got {v:?}")))?;
    // a pool built earlier in the process wins; that only happens in tests
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let args = &argv[1.min(argv.len())..];
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Kernel(a) => commands::kernel(a, args),
        Command::Variation(a) => commands::variation(a, args),
        Command::Converge(a) => commands::converge(a, args),
        Command::Counterexample(c) => commands::counterexample(c, args),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
