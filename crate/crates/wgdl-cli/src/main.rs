//! Batch front end: `simulate`, `verify` and `exponents`.

mod config;
mod exponents_cmd;
mod simulate;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Format;

#[derive(Parser)]
#[command(name = "wgdl", version, about = "Fourth-order NLS on waveguides: simulation and verification")]
struct Cli {
    /// Worker threads for FFTs and reductions; results do not depend on it.
    #[arg(long, global = true, env = "WGDL_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured initial data and write records, checkpoints and a summary.
    Simulate {
        /// Run configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory, created if absent.
        #[arg(long, default_value = "wgdl-out")]
        out: PathBuf,
        /// Overrides `output.format`.
        #[arg(long, value_parser = parse_format)]
        format: Option<Format>,
        /// Overrides `initial.seed` for random initial data.
        #[arg(long)]
        seed: Option<u64>,
        /// Run despite resolution warnings.
        #[arg(long)]
        force: bool,
    },
    /// Run property suites and print a JSON report; exit 0 iff every claim passes.
    Verify {
        /// Suite to run.
        #[arg(long, value_enum, default_value = "all")]
        suite: verify::Suite,
        /// Seed for the randomized samples.
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
    },
    /// Criticality class and index certificates for `(d, n, equation, p)`.
    Exponents {
        /// Euclidean dimensions.
        d: usize,
        /// Torus dimensions.
        n: usize,
        #[arg(value_enum)]
        equation: exponents_cmd::Equation,
        /// Exact literal: `2`, `9/5` or `1.8`.
        #[arg(allow_hyphen_values = true)]
        p: String,
    },
}

/// Print to stdout, tolerating a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn main() -> ExitCode {
    // Usage errors share exit code 1 with configuration errors; 2 is reserved for aborted runs.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match cli.command {
        Command::Simulate {
            config,
            out,
            format,
            seed,
            force,
        } => {
            let args = simulate::SimulateArgs {
                config,
                out,
                format,
                seed,
                force,
            };
            match simulate::run(&args) {
                Ok(false) => ExitCode::SUCCESS,
                Ok(true) => {
                    eprintln!("run aborted; final checkpoint written to {}", args.out.join("final.wgdl").display());
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Verify { suite, seed } => {
            let report = verify::run(suite, seed);
            match serde_json::to_string_pretty(&report) {
                Ok(text) => emit(&text),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                for name in &report.failed {
                    eprintln!("FAILED: {name}");
                }
                ExitCode::from(1)
            }
        }
        Command::Exponents { d, n, equation, p } => match exponents_cmd::report(d, n, equation, &p) {
            Ok(v) => {
                emit(&serde_json::to_string_pretty(&v).expect("json"));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
