use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use smartpark_core::{decide, default_depth, parse, render_tree, Formula, Verdict};

#[derive(Parser)]
#[command(name = "park", version, about = "Temporal-logic preference engine for a smart car park")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability (or validity) of a formula and print its truth tree.
    Check {
        /// Report VALID/INVALID instead of SAT/UNSAT.
        #[arg(long)]
        valid: bool,
        /// Tableau depth bound; defaults to a bound derived from the formula.
        #[arg(long)]
        depth: Option<usize>,
        formula: String,
    },
    /// Replay a presence trace through the agents.
    Simulate {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        store_in: Option<PathBuf>,
        #[arg(long)]
        store_out: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Inspect a store file.
    Store {
        #[command(subcommand)]
        command: StoreCommand,
    },
}

#[derive(Subcommand)]
enum StoreCommand {
    /// Print the store as a table sorted by user and count.
    Dump { file: PathBuf },
}

const INPUT_ERROR: u8 = 2;

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("park: {message}");
    ExitCode::from(INPUT_ERROR)
}

fn check(text: &str, valid: bool, depth: Option<usize>) -> ExitCode {
    let f = match parse(text) {
        Ok(f) => f,
        Err(e) => return fail(format!("cannot parse formula: {e}")),
    };
    let target = if valid { Formula::not(f) } else { f };
    let bound = depth.unwrap_or_else(|| default_depth(&target));
    let result = match decide(&target, bound) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let positive = match (valid, result.verdict) {
        (false, Verdict::Sat) => {
            println!("SAT");
            true
        }
        (false, Verdict::Unsat) => {
            println!("UNSAT");
            false
        }
        (true, Verdict::Unsat) => {
            println!("VALID");
            true
        }
        (true, Verdict::Sat) => {
            println!("INVALID");
            false
        }
    };
    print!("{}", render_tree(&result.tree));
    if positive {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Check { valid, depth, formula } => check(&formula, valid, depth),
        Command::Simulate { topology, trace, store_in, store_out, log, depth } => {
            match park::simulate(&topology, &trace, store_in.as_deref(), &store_out, &log, depth) {
                Ok(out) => {
                    eprintln!("entered {}, exited {}, still inside {}", out.entered, out.exited, out.inside);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Store { command: StoreCommand::Dump { file } } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return fail(format!("{}: {e}", file.display())),
            };
            match park::parse_store(&text) {
                Ok(store) => {
                    print!("{}", park::dump_store(&store));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(format!("{}: {e}", file.display())),
            }
        }
    }
}
