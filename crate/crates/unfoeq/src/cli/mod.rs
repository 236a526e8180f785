//! Command-line front end. Every command prints a line-oriented `key: value`
//! report on stdout and may write structure, pmap and DOT files.
//!
//! Exit codes: 0 and 1 are verdicts (model found / none, holds / fails),
//! 2 is a usage error, 3 an input format error, 4 an exhausted budget.

mod commands;
mod files;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::Error;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FORMAT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "unfoeq", version, about = "Finite models for unary negation logic with equivalences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Formula file plus its signature header.
#[derive(Debug, Clone, Args)]
pub struct FormulaInput {
    /// Formula text file.
    pub formula: PathBuf,
    /// Signature header (`base NAME ARITY` / `eq NAME` per line).
    #[arg(long)]
    pub sig: PathBuf,
}

/// A structure file over the (normalized) signature.
#[derive(Debug, Clone, Args)]
pub struct StructureInput {
    #[arg(long)]
    pub structure: PathBuf,
    /// Require distinguished relations to be given as full equivalences
    /// instead of closing them.
    #[arg(long)]
    pub no_close: bool,
}

#[derive(Debug, Clone, Args)]
pub struct Outputs {
    /// Result structure file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Graphviz output.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a formula; exit 1 when it is outside the unary negation fragment.
    Validate {
        #[command(flatten)]
        input: FormulaInput,
    },
    /// Print the normal form and its signature.
    Normalize {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sig_out: Option<PathBuf>,
    },
    /// Print the reduction to transitive semantics.
    Reduce {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Model check; exit 0 when the structure is a model.
    Check {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        structure: StructureInput,
    },
    /// Search for a finite model up to a size.
    Solve {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// Search node limit; exceeding it exits with code 4.
        #[arg(long)]
        node_limit: Option<u64>,
        /// Interpret distinguished symbols as transitive relations.
        #[arg(long)]
        transitive: bool,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Two-variable construction from a finite model.
    Construct2v {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        structure: StructureInput,
        /// Element the construction starts from.
        #[arg(long, default_value_t = 0)]
        origin: u32,
        #[arg(long)]
        pmap: Option<PathBuf>,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// General construction from a finite model.
    Constructnd {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        structure: StructureInput,
        #[arg(long, default_value_t = 0)]
        origin: u32,
        /// Largest intermediate structure before giving up (exit 4).
        #[arg(long, default_value_t = 20_000)]
        max_size: usize,
        #[arg(long)]
        pmap: Option<PathBuf>,
        /// The result with its witness-numbering relations, as read by `verify`.
        #[arg(long)]
        full_out: Option<PathBuf>,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Truncated unraveling of a finite model.
    Unravel {
        #[command(flatten)]
        input: FormulaInput,
        #[command(flatten)]
        structure: StructureInput,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        root: u32,
        #[arg(long)]
        pmap: Option<PathBuf>,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Re-check the conditions of a construction output against its pattern.
    Verify {
        #[command(flatten)]
        input: FormulaInput,
        /// The finite model the construction started from.
        #[arg(long)]
        pattern: PathBuf,
        /// Construction output (for the general construction, the `--full-out` file).
        #[arg(long)]
        result: PathBuf,
        #[arg(long)]
        pmap: PathBuf,
        #[arg(long, default_value_t = 0)]
        origin: u32,
    },
    /// Evaluate the size bounds.
    Bounds {
        /// Live symbols for the two-variable bound.
        #[arg(long = "T")]
        t: Option<u32>,
        /// Realized generalized types.
        #[arg(long = "K", default_value_t = 1)]
        k: u32,
        /// Existential conjuncts.
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Live symbols for the general bound.
        #[arg(long = "M")]
        big_m: Option<u32>,
        /// Formula length.
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Subtree types.
        #[arg(long, default_value_t = 1)]
        g: u32,
        /// Refuse (exit 4) results longer than this many bits.
        #[arg(long, default_value_t = 1 << 20)]
        max_bits: u64,
    },
    /// Run both constructions on random fitted formulas.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Distinguished symbols.
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

/// Maps a library error to an exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExhausted => EXIT_BUDGET,
        Error::Fragment(_) | Error::Invalid(_) => EXIT_NO,
        _ => EXIT_FORMAT,
    }
}

/// Runs one command, writing the report to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match commands::dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `args` (program name first) and runs.
pub fn run_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{e}");
                EXIT_YES
            }
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_args(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
