use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use flycat_cli::{failed_suites, run_scenario, CliError, Command, Format, ScenarioConfig};

#[derive(Parser)]
#[command(name = "flycat", version, about = "Flying-cat parity check scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Error budget of one check over an alpha sweep.
    Tradeoff(Common),
    /// Amplitude minimizing the total check error.
    OptimizeAlpha(Common),
    /// Single parity check, exact or sampled against exact.
    Check(Common),
    /// Three-qubit GHZ preparation.
    Ghz(Common),
    /// Tetrahedron-state preparation with fidelity and witness.
    TetraPrepare(Common),
    /// Decoder lookup for a syndrome, an error, or the whole table.
    TetraDecode(Common),
    /// Witness sweep over alpha and loss.
    Witness(Common),
    /// Controlled teleportation fidelities.
    Teleport(Common),
    /// Circuit-QED infidelity budget.
    Feasibility(Common),
    /// Transmission and circulator loss.
    LossBudget(Common),
    /// Invariant suites.
    Selfcheck(Common),
}

#[derive(Args)]
struct Common {
    /// TOML scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

impl Sub {
    fn split(self) -> (Command, Common) {
        match self {
            Sub::Tradeoff(c) => (Command::Tradeoff, c),
            Sub::OptimizeAlpha(c) => (Command::OptimizeAlpha, c),
            Sub::Check(c) => (Command::Check, c),
            Sub::Ghz(c) => (Command::Ghz, c),
            Sub::TetraPrepare(c) => (Command::TetraPrepare, c),
            Sub::TetraDecode(c) => (Command::TetraDecode, c),
            Sub::Witness(c) => (Command::Witness, c),
            Sub::Teleport(c) => (Command::Teleport, c),
            Sub::Feasibility(c) => (Command::Feasibility, c),
            Sub::LossBudget(c) => (Command::LossBudget, c),
            Sub::Selfcheck(c) => (Command::Selfcheck, c),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (command, flags) = cli.command.split();
    let mut cfg = match &flags.config {
        Some(path) => ScenarioConfig::load(path, Some(command))?,
        None => ScenarioConfig::new(command),
    };
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if flags.shots.is_some() {
        cfg.shots = flags.shots;
    }
    if let Some(f) = flags.format {
        cfg.format = f;
    }
    if flags.out.is_some() {
        cfg.out = flags.out;
    }
    if flags.threads.is_some() {
        cfg.threads = flags.threads;
    }
    let start = Instant::now();
    let report = run_scenario(&cfg)?;
    report.write(cfg.format, cfg.out.as_deref())?;
    eprintln!("{}: {:.3} s", cfg.command, start.elapsed().as_secs_f64());
    if !report.ok {
        return Err(CliError::Selfcheck(failed_suites(&report).join(", ")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("flycat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
