//! Command-line front end: scenario flags, config files, preset
//! experiments, and CSV/TSV emission for the latency toolkit.
//!
//! Exit codes: 0 on success, 1 on configuration or usage errors, 2 on
//! runtime failures (for example a gossip slot-cap overrun or an output
//! write error).

use std::ffi::OsString;

use clap::Parser;

mod args;
mod commands;
mod output;
mod settings;

pub use args::{Cli, Command, ScenarioArgs};
pub use settings::{Preset, Settings};

/// Error split mirrored by the process exit code.
#[derive(Debug)]
pub enum RunError {
    /// Bad flags, bad config file, out-of-range values. Exit 1.
    Config(String),
    /// Failures while running or writing an otherwise valid scenario.
    /// Exit 2.
    Runtime(String),
}

/// Parses `argv`, runs the selected subcommand, and returns the process
/// exit code. All diagnostics go to the error stream; results go to
/// standard output or to `--output`.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(RunError::Config(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(RunError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn execute(cli: Cli) -> Result<(), RunError> {
    let env_seed = settings::seed_from_env().map_err(RunError::Config)?;
    let (preset, scenario) = match &cli.command {
        Command::Analytic(a) | Command::Sim(a) | Command::Crossing(a) => (Preset::None, a),
        Command::Fig4(a) => (Preset::Fig4, a),
        Command::Fig5(a) => (Preset::Fig5, a),
        Command::Fig6(a) => (Preset::Fig6, a),
    };
    let settings = Settings::resolve(scenario, env_seed, preset).map_err(RunError::Config)?;
    settings
        .validate(matches!(cli.command, Command::Sim(_)))
        .map_err(RunError::Config)?;
    let doc = match &cli.command {
        Command::Analytic(_) => commands::analytic(&settings),
        Command::Sim(_) => commands::sim(&settings)?,
        Command::Fig4(_) => commands::fig4(&settings)?,
        Command::Fig5(_) => commands::fig5(&settings)?,
        Command::Fig6(_) => commands::fig6(&settings)?,
        Command::Crossing(_) => commands::crossing(&settings),
    };
    let text = doc.render(settings.format);
    output::emit(&text, settings.output.as_deref())
        .map_err(|e| RunError::Runtime(format!("cannot write output: {e}")))
}
