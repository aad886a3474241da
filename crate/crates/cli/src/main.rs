//! `pinf`: batch front end for higher Poisson bracket computations.
//!
//! Exit codes: 0 when every check passes, 1 on a mathematical failure (the
//! report carries a witness), 2 on usage, I/O or parse errors.

mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pinf_core::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Doc,
}

#[derive(Parser, Debug)]
#[command(name = "pinf", version, about = "Higher Poisson brackets on resolvents of graded Poisson ideals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Highest resolvent level to build.
    #[arg(long, global = true, value_name = "M")]
    levels: Option<u32>,
    /// Internal degree bound of the resolvent and of bracket tables.
    #[arg(long, global = true, value_name = "D")]
    maxdeg: Option<i64>,
    /// Cache directory for resolvents and π sequences.
    #[arg(long, global = true, env = "PINF_CACHE", value_name = "DIR")]
    cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Jacobi identity, Poisson ideal property, Z and degree report.
    Check { input: PathBuf },
    /// The tensors Z, 𝒜, the Maurer–Cartan residue and the curvature.
    Tensors {
        input: PathBuf,
        /// Parameter of the connection curvature, a rational number.
        #[arg(long)]
        t: Option<String>,
    },
    /// Minimal-model resolvent and its Betti table.
    Resolve { input: PathBuf },
    /// The π sequence with residue certificates.
    Pi { input: PathBuf },
    /// Evaluates the m-ary bracket on the given arguments, or tabulates it on
    /// generators when no arguments are given.
    Bracket {
        input: PathBuf,
        #[arg(long)]
        arity: usize,
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        args: Vec<String>,
    },
    /// Brackets and anchors of the induced algebroid.
    Algebroid {
        input: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// Certifies a π sequence read from a `pi --format doc` output or a
    /// text listing.
    Verify {
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        pi: PathBuf,
        /// Also require ⟦π_i, π_j⟧ = 0 for all i, j ≥ 1.
        #[arg(long)]
        pairwise: bool,
    },
    /// Built-in examples.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand, Debug)]
enum ExamplesAction {
    List,
    Emit { name: String },
}

/// Options shared by every command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: &'static str,
    pub input: Option<PathBuf>,
    pub max_level: Option<u32>,
    pub max_degree: Option<i64>,
    pub cache: Option<PathBuf>,
    pub format: Format,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::UnknownVariable(_) | Error::Invalid(_) | Error::Dimension(_) | Error::Io(_) | Error::Json(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = |command, input: Option<&PathBuf>| RunConfig {
        command,
        input: input.cloned(),
        max_level: cli.levels,
        max_degree: cli.maxdeg,
        cache: cli.cache.clone(),
        format: cli.format,
    };
    let result = match &cli.command {
        Command::Check { input } => commands::check(&config("check", Some(input))),
        Command::Tensors { input, t } => commands::tensors(&config("tensors", Some(input)), t.as_deref()),
        Command::Resolve { input } => commands::resolve(&config("resolve", Some(input))),
        Command::Pi { input } => commands::pi(&config("pi", Some(input))),
        Command::Bracket { input, arity, args } => commands::bracket(&config("bracket", Some(input)), *arity, args),
        Command::Algebroid { input, arity } => commands::algebroid(&config("algebroid", Some(input)), *arity),
        Command::Verify { input, pi, pairwise } => commands::verify(&config("verify", Some(input)), pi, *pairwise),
        Command::Examples { action: ExamplesAction::List } => commands::examples_list(&config("examples", None)),
        Command::Examples { action: ExamplesAction::Emit { name } } => commands::examples_emit(name),
    };
    match result {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
