use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use slspec_cli::{parse_with_overrides, run, RunError};

#[derive(Parser)]
#[command(name = "slspec", version, about = "Singular Sturm–Liouville spectral computations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a run file and write its CSV table.
    Run {
        /// Override a value, e.g. `--set problem.beta=1.5`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        file: PathBuf,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("slspec: {msg}");
    ExitCode::from(code)
}

fn threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("SLSPEC_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| format!("SLSPEC_THREADS: expected a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Err(e) = threads() {
        return fail(1, e);
    }
    let Cmd::Run { set, file } = cli.command;
    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => return fail(1, format!("{}: {e}", file.display())),
    };
    let spec = match parse_with_overrides(&text, &set) {
        Ok(s) => s,
        Err(e) => return fail(1, format!("{}: {e}", file.display())),
    };
    match run(&spec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ RunError::Numerical(_)) => fail(e.exit_code(), e),
        Err(e) => fail(e.exit_code(), format!("{}: {e}", file.display())),
    }
}
