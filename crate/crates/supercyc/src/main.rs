use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use supercyc::commands::{run, Command};
use supercyc::{exit, Mode, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "supercyc", version, about = "Exact experiments on operator series of weighted backward shifts")]
struct Cli {
    /// JSON run configuration; every field is optional.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Overrides the configured arithmetic mode.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Output directory for reports.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Right-inverse identities, bounds and oracle checks.
    Lemmas,
    /// Limit detection, schedule and criterion rows for a family.
    Criterion,
    /// Builds a witness vector for a target list and traces its orbit.
    Witness,
    /// Operator-norm brackets and the introductory counterexamples.
    Isometry,
    /// Runs all of the above; the exit code is the worst one.
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => return config_failure(&e.to_string()),
        },
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = cli.mode {
        cfg.mode = match mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        };
    }
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    if let Err(e) = cfg.validate() {
        return config_failure(&e.to_string());
    }
    let cmd = match cli.command {
        Cmd::Lemmas => Command::Lemmas,
        Cmd::Criterion => Command::Criterion,
        Cmd::Witness => Command::Witness,
        Cmd::Isometry => Command::Isometry,
        Cmd::Report => Command::Report,
    };
    let outcome = run(cmd, &cfg);
    if let Err(e) = outcome.files.write_to(&cfg.out) {
        eprintln!("error: cannot write to {}: {e}", cfg.out.display());
        return ExitCode::from(exit::CONFIG);
    }
    for line in &outcome.messages {
        if outcome.exit == exit::CONFIG {
            eprintln!("error: {line}");
        } else {
            println!("{line}");
        }
    }
    println!("mode {} config {} exit {}", cfg.mode.label(), &cfg.hash()[..16], outcome.exit);
    ExitCode::from(outcome.exit)
}

fn config_failure(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!("usage: supercyc [--config PATH] [--seed U64] [--mode exact|float] [--out DIR] <lemmas|criterion|witness|isometry|report>");
    ExitCode::from(exit::CONFIG)
}
