//! Command-line front end: metric reports, figure sweeps, solvers, Monte
//! Carlo runs and oracle checks.

pub mod args;
pub mod commands;
pub mod config;
pub mod presets;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use thiserror::Error;
use zalm_core::analytics::GainTarget;

use args::{Cli, Command, SolveTarget};
use commands::GainChoice;
use config::resolve_params;

#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    BadParams(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Unachievable(String),
    #[error("tolerance exceeded: {0}")]
    ToleranceExceeded(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BadParams(_) => 2,
            CliError::Io(_) => 3,
            CliError::Unachievable(_) => 4,
            CliError::ToleranceExceeded(_) => 5,
        }
    }
}

/// Parses `args` (program name first) and runs the command, writing reports
/// to `out`. Argument errors print clap's message and exit with status 2.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    execute(cli.command, out)
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    let params_of = |p: &args::ParamArgs| resolve_params(p.config.as_deref(), &p.overrides());
    match command {
        Command::Metrics { params, format } => commands::metrics(out, &params_of(&params)?, format),
        Command::Sweep(a) => commands::sweep(out, &a),
        Command::Solve { target } => match target {
            SolveTarget::Gain {
                params,
                fraction,
                fidelity,
            } => {
                let target = match (fraction, fidelity) {
                    (Some(x), _) => GainTarget::Fraction(x),
                    (None, Some(x)) => GainTarget::Fidelity(x),
                    (None, None) => {
                        return Err(CliError::BadParams("give --fraction or --fidelity".into()))
                    }
                };
                commands::solve_gain_cmd(out, &params_of(&params)?, target)
            }
            SolveTarget::Islands {
                params,
                target,
                fraction,
                reference_eta_t,
            } => {
                let choice = match (fraction, reference_eta_t) {
                    (Some(b), _) => GainChoice::Fraction(b),
                    (None, Some(r)) => GainChoice::MatchReference(r),
                    (None, None) => GainChoice::AsGiven,
                };
                commands::solve_islands_cmd(out, &params_of(&params)?, target, choice)
            }
        },
        Command::Mc(a) => {
            let params = params_of(&a.params)?;
            let report = commands::mc_report(&params, &a);
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            writeln!(out, "{text}").map_err(|e| CliError::Io(e.to_string()))
        }
        Command::Oracle(a) => commands::oracle(out, &params_of(&a.params)?, &a),
        Command::Figures { out_dir } => {
            for path in commands::figures(&out_dir)? {
                writeln!(out, "{}", path.display()).map_err(|e| CliError::Io(e.to_string()))?;
            }
            Ok(())
        }
    }
}
