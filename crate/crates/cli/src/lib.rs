//! Scenario runner for the flycat toolkit. A TOML config names a command and
//! its parameters; the result is a versioned table written as CSV or JSON.

mod commands;
mod config;
mod error;
mod report;
mod selfcheck;

pub use config::{
    AlphaRange, BasisArg, CableArg, Command, CqedConfig, Duration, Eta, Format, Frequency, FrequencyUnit, InputArg,
    Params, Preset, RunMode, ScenarioConfig, TimeUnit, DEFAULT_SEED,
};
pub use error::CliError;
pub use report::{Cell, Provenance, RunReport, SCHEMA_VERSION};
pub use selfcheck::{failed_suites, selfcheck, selfcheck_with, SELFCHECK_SHOTS, SELFCHECK_SIGMAS};

use flycat::netstates::DecoderTable;

/// Runs `cfg.command`, inside a dedicated thread pool when `cfg.threads` is
/// set. Results do not depend on the thread count.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport, CliError> {
    match cfg.threads {
        Some(0) => Err(CliError::Validation("threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(|| dispatch(cfg)),
        None => dispatch(cfg),
    }
}

fn dispatch(cfg: &ScenarioConfig) -> Result<RunReport, CliError> {
    match cfg.command {
        Command::Tradeoff => commands::tradeoff(cfg),
        Command::OptimizeAlpha => commands::optimize(cfg),
        Command::Check => commands::check(cfg),
        Command::Ghz => commands::ghz(cfg),
        Command::TetraPrepare => commands::tetra_prepare(cfg),
        Command::TetraDecode => commands::tetra_decode_cmd(cfg),
        Command::Witness => commands::witness(cfg),
        Command::Teleport => commands::teleport(cfg),
        Command::Feasibility => commands::feasibility(cfg),
        Command::LossBudget => commands::loss_budget_cmd(cfg),
        Command::Selfcheck => Ok(selfcheck_with(cfg, &DecoderTable::standard())),
    }
}
