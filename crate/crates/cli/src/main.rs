//! `tfse`: evaluations, simulations and verification runs for the
//! time-fractional Schrödinger equation.
//!
//! Exit codes: 0 ok, 1 verification failure or replay mismatch, 2 usage
//! error, 3 numerical or I/O failure.

mod args;
mod config;
mod free;
mod ml;
mod output;
mod session;
mod well;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tfse_core::verify::{self, Effort, Suite};

use crate::output::RunManifest;
use crate::session::{usage, ConfigArg, Session, UsageError};

#[derive(Debug, Parser)]
#[command(name = "tfse", version, about = "Time-fractional Schrödinger equation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mittag-Leffler function on the ±i rays with its decomposition.
    #[command(args_override_self = true)]
    Ml(ml::MlArgs),
    /// Infinite square well, one mode.
    #[command(args_override_self = true)]
    Well(well::WellArgs),
    /// Free Gaussian packet.
    #[command(args_override_self = true)]
    Free(free::FreeArgs),
    /// Run the acceptance checks and print a pass/fail table.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Rerun a manifest and compare output checksums.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum SuiteArg {
    Specfun,
    Fraccalc,
    Tfse,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Specfun => Suite::Specfun,
            SuiteArg::Fraccalc => Suite::Fraccalc,
            SuiteArg::Tfse => Suite::Tfse,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Coarser lattices for a fast smoke run.
    #[arg(long)]
    quick: bool,
    /// Print every measurement, not just the table.
    #[arg(long, short)]
    verbose: bool,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Debug, Clone, Args)]
struct ReplayArgs {
    /// Manifest written by an earlier run.
    manifest: PathBuf,
    /// Where to write the rerun (default: `replay/` next to the manifest).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

enum Outcome {
    Ok,
    Failed,
}

fn thread_count() -> Result<usize> {
    let Ok(raw) = std::env::var("TFSE_THREADS") else {
        return Ok(rayon::current_num_threads());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("TFSE_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(n)
}

fn run_verify(args: &VerifyArgs) -> Outcome {
    let effort = if args.quick { Effort::Quick } else { Effort::Full };
    let outcomes = verify::run_suite(args.suite.into(), effort);
    println!("{:<4} {:<8} {:<44} {:>8}", "id", "result", "criterion", "seconds");
    for o in &outcomes {
        println!(
            "{:<4} {:<8} {:<44} {:>8.2}",
            o.id,
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.elapsed.as_secs_f64()
        );
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if args.verbose || failed > 0 {
        println!();
        for o in outcomes.iter().filter(|o| args.verbose || !o.passed) {
            println!("{o}");
        }
    }
    println!("\n{} of {} checks passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        Outcome::Ok
    } else {
        Outcome::Failed
    }
}

fn run_replay(args: &ReplayArgs, threads: usize) -> Result<Outcome> {
    let original = RunManifest::load(&args.manifest)?;
    let out_dir = match &args.out_dir {
        Some(d) => d.clone(),
        None => args.manifest.parent().unwrap_or(std::path::Path::new(".")).join("replay"),
    };
    let mut argv = vec!["tfse".to_string(), original.command.clone()];
    argv.extend(original.arguments.iter().cloned());
    argv.push("--out-dir".into());
    argv.push(out_dir.to_string_lossy().into_owned());
    let cli = Cli::try_parse_from(&argv).map_err(|e| usage(format!("manifest arguments do not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(usage("a manifest cannot replay another replay"));
    }
    let session = Session {
        arguments: original.arguments.clone(),
        threads,
    };
    dispatch(cli.command, &session)?;
    let rerun = RunManifest::load(&out_dir.join(RunManifest::file_name(&original.command)))?;
    let mut all_match = original.outputs.len() == rerun.outputs.len();
    for file in &original.outputs {
        let matched = rerun.outputs.iter().any(|r| r.file == file.file && r.sha256 == file.sha256);
        all_match &= matched;
        println!("{} {}", if matched { "match   " } else { "MISMATCH" }, file.file);
    }
    Ok(if all_match { Outcome::Ok } else { Outcome::Failed })
}

fn dispatch(command: Command, session: &Session) -> Result<Outcome> {
    match command {
        Command::Ml(a) => ml::run(&a, session).map(|_| Outcome::Ok),
        Command::Well(a) => well::run(&a, session).map(|_| Outcome::Ok),
        Command::Free(a) => free::run(&a, session).map(|_| Outcome::Ok),
        Command::Verify(a) => Ok(run_verify(&a)),
        Command::Replay(a) => run_replay(&a, session.threads),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<tfse_core::Error>() {
        Some(
            tfse_core::Error::InvalidOrder(_)
            | tfse_core::Error::InvalidInput(_)
            | tfse_core::Error::WrongRegime { .. }
            | tfse_core::Error::GridMismatch(_),
        ) => 2,
        _ => 3,
    }
}

fn hint(err: &anyhow::Error) -> Option<&'static str> {
    match err.downcast_ref::<tfse_core::Error>()? {
        tfse_core::Error::DenominatorSingularity { .. } => Some(
            "nu sits where a second pole of the Laplace transform reaches the branch cut (nu = 4/3 for the physical ray); \
             move nu away from it by about 1e-3 or more",
        ),
        tfse_core::Error::SingularTime => Some("drop t = 0 from --t-grid; this quantity diverges there for nu < 1"),
        _ => None,
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args_os().map(|a| a.to_string_lossy().into_owned()).collect();
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = thread_count().and_then(|threads| {
        let session = Session {
            arguments: argv.iter().skip(2).cloned().collect(),
            threads,
        };
        dispatch(cli.command, &session)
    });
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if let Some(h) = hint(&e) {
                eprintln!("hint: {h}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
