use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pkt::cli::{cmd_check, cmd_examples_emit, cmd_examples_list, cmd_lie, RunOptions};

#[derive(Parser)]
#[command(name = "pkt", version, about = "Verify Killing-Poisson structures on coordinate charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks on a chart spec.
    Check {
        spec: PathBuf,
        /// Residual tolerance (overrides the spec).
        #[arg(long)]
        tol: Option<f64>,
        /// Grid points per axis (overrides the spec).
        #[arg(long)]
        grid: Option<usize>,
        /// Comma-separated checks (overrides the spec).
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Write a JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List or write built-in fixtures.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
    /// Run the Lie algebra pipeline on a Lie algebra spec.
    Lie {
        spec: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        /// Checks for the induced bivector (overrides the spec).
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// Print fixture names.
    List {
        /// List Lie algebra fixtures instead of chart fixtures.
        #[arg(long)]
        lie: bool,
    },
    /// Write `<dir>/<name>.json`.
    Emit {
        name: String,
        dir: PathBuf,
        /// Parameters a,b,c of quadratic-family.
        #[arg(long, value_delimiter = ',')]
        abc: Option<Vec<f64>>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (mut out, mut err) = (io::stdout(), io::stderr());
    let code = match cli.command {
        Command::Check { spec, tol, grid, checks, report } => {
            let opts = RunOptions { tol, grid, checks, report };
            cmd_check(&spec, &opts, &mut out, &mut err)
        }
        Command::Lie { spec, tol, grid, checks, report } => {
            let opts = RunOptions { tol, grid, checks, report };
            cmd_lie(&spec, &opts, &mut out, &mut err)
        }
        Command::Examples { action: ExamplesAction::List { lie } } => cmd_examples_list(lie, &mut out),
        Command::Examples { action: ExamplesAction::Emit { name, dir, abc } } => {
            let params = match abc.as_deref() {
                None => None,
                Some(&[a, b, c]) => Some((a, b, c)),
                Some(_) => {
                    eprintln!("error: --abc takes three comma-separated numbers");
                    return ExitCode::from(2);
                }
            };
            cmd_examples_emit(&name, &dir, params, &mut out, &mut err)
        }
    };
    ExitCode::from(code as u8)
}
