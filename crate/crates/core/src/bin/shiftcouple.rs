use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use shiftcouple::axioms::{DEFAULT_CASES, DEFAULT_SEED};
use shiftcouple::cli::{self, CommandOutput, EXIT_INPUT_ERROR};
use shiftcouple::format::{InputError, Problem, ProblemFile};
use shiftcouple::Rational;

/// Shift-couplings between finite measures under finite permutation groups.
#[derive(Parser)]
#[command(name = "shiftcouple", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Problem file, or `-` for standard input.
    problem: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether mu and nu agree on every invariant set.
    Check(Input),
    /// Build a coupling by iterated peeling.
    Couple {
        #[command(flatten)]
        input: Input,
        /// Maximum number of passes over the group.
        #[arg(long)]
        max_passes: Option<usize>,
        /// Stop when a pass removes at most this much mass (rational).
        #[arg(long, value_parser = parse_epsilon)]
        epsilon: Option<Rational>,
    },
    /// Build a coupling by direct per-orbit transport.
    Oracle(Input),
    /// Decompose set_a into set_b up to base-null sets.
    Sets(Input),
    /// Re-check a document produced by another subcommand.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Output document to check, or `-` for standard input.
        document: PathBuf,
    },
    /// Run the randomized axiom suite on a registered instance.
    Axioms {
        /// One of extnat, rational, measure, powerset, sets, malg.
        instance: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CASES)]
        cases: usize,
        /// Problem file whose group is checked against the theorem conditions.
        #[arg(long)]
        action: Option<PathBuf>,
    },
}

fn parse_epsilon(text: &str) -> Result<Rational, String> {
    cli::parse_epsilon(text).map_err(|e| e.message)
}

fn read_input(path: &Path) -> Result<String, InputError> {
    let mut text = String::new();
    let result = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    result.map_err(|e| InputError::general(format!("cannot read {}: {e}", path.display())))?;
    Ok(text)
}

fn load(path: &Path) -> Result<Problem, InputError> {
    ProblemFile::from_json(&read_input(path)?)?.validate()
}

fn run(command: Command) -> Result<CommandOutput, InputError> {
    match command {
        Command::Check(input) => cli::cmd_check(&load(&input.problem)?),
        Command::Couple { input, max_passes, epsilon } => {
            let problem = load(&input.problem)?;
            let config = problem.tarski_config(max_passes, epsilon)?;
            cli::cmd_couple(&problem, &config)
        }
        Command::Oracle(input) => cli::cmd_oracle(&load(&input.problem)?),
        Command::Sets(input) => cli::cmd_sets(&load(&input.problem)?),
        Command::Verify { input, document } => cli::cmd_verify(&load(&input.problem)?, &read_input(&document)?),
        Command::Axioms { instance, seed, cases, action } => {
            let action = action.as_deref().map(load).transpose()?;
            cli::cmd_axioms(&instance, seed, cases, action.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT_ERROR as u8 } else { 0 });
        }
    };
    match run(args.command) {
        Ok(output) => {
            print!("{}", output.render());
            ExitCode::from(output.exit_code as u8)
        }
        Err(e) => {
            eprintln!("shiftcouple: {e}");
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
    }
}
