use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use chiral_lg_cli::{document, run, CliError, Command, Oracle, ProblemSpec};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Exact computations for chiral de Rham and Landau–Ginzburg complexes.
///
/// Exit status: 0 success or pass, 1 a check failed (witness in the output),
/// 2 invalid input.
#[derive(Debug, Parser)]
#[command(name = "chiral-lg", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Problem specification (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Oracle to compare `char` against.
    #[arg(long, value_enum, default_value_t = Oracle::None)]
    oracle: Oracle,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("chiral-lg: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if args.threads == 0 {
        return fail(&CliError::invalid("--threads", "must be at least 1"));
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build_global() {
        eprintln!("chiral-lg: could not size the thread pool: {e}");
    }
    let text = match std::fs::read_to_string(&args.spec) {
        Ok(t) => t,
        Err(e) => return fail(&CliError::invalid("--spec", format!("{}: {e}", args.spec.display()))),
    };
    let spec = match ProblemSpec::parse(&text) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let start = Instant::now();
    let outcome = match run(args.command, &spec, args.oracle) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let body = match args.format {
        Format::Json => {
            let doc = document(args.command, &spec, &outcome, start.elapsed().as_millis(), args.threads);
            serde_json::to_string_pretty(&doc).expect("documents serialize") + "\n"
        }
        Format::Csv => outcome.csv.clone(),
    };
    let written = match &args.out {
        Some(path) => std::fs::write(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("chiral-lg: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.status.exit_code() as u8)
}
