//! Run reports.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult, Command, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    /// Subcommand name.
    pub command: String,
    /// The resolved command, every default filled in.
    pub config: serde_json::Value,
    pub jobs: usize,
    pub results: serde_json::Value,
    pub seeds: Vec<u64>,
    pub timings: Timings,
}

impl RunReport {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialise");
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn command(&self) -> CliResult<Command> {
        serde_json::from_value(self.config.clone())
            .map_err(|e| CliError::Input(format!("config snapshot: {e}")))
    }

    /// Canonical text of the results payload, for byte comparison.
    pub fn payload(&self) -> String {
        serde_json::to_string(&self.results).expect("payload serialises")
    }
}

/// Where `command` writes its report.
pub fn report_path(command: &Command) -> PathBuf {
    use Command as C;
    let (explicit, out) = match command {
        C::Compress(a) => (&a.report, &a.out),
        C::VerifyBound(a) => (&a.report, &a.cover),
        C::Compare(a) => (&a.report, &a.out),
        C::GenData(a) => (&a.common().report, &a.common().out),
        C::Plot(a) => (&a.report, &a.out),
        C::Replay(a) => (&a.out_report, &a.report),
    };
    explicit.clone().unwrap_or_else(|| match command {
        C::VerifyBound(_) => {
            let mut name = out.as_os_str().to_owned();
            name.push(".bound.json");
            PathBuf::from(name)
        }
        C::Replay(_) => {
            let mut name = out.as_os_str().to_owned();
            name.push(".replay.json");
            PathBuf::from(name)
        }
        _ => crate::report_path_for(out),
    })
}

fn build(command: &Command, jobs: usize, outcome: Outcome, started: Instant) -> RunReport {
    RunReport {
        tool: "mfc".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.name().into(),
        config: crate::to_value(command),
        jobs,
        results: outcome.results,
        seeds: outcome.seeds,
        timings: Timings {
            wall_seconds: started.elapsed().as_secs_f64(),
        },
    }
}

/// Run a non-replay command, write its report and return the report path.
pub fn execute(command: &Command, jobs: usize) -> CliResult<PathBuf> {
    execute_to(command, jobs, &report_path(command)).map(|(path, _)| path)
}

pub(crate) fn execute_to(command: &Command, jobs: usize, path: &Path) -> CliResult<(PathBuf, RunReport)> {
    let started = Instant::now();
    let outcome = match command {
        Command::Compress(a) => crate::compress::run(a),
        Command::VerifyBound(a) => crate::verify::run(a),
        Command::Compare(a) => crate::compare::run(a),
        Command::GenData(a) => crate::gen::run(a),
        Command::Plot(a) => crate::plot::run(a),
        Command::Replay(_) => return Err(CliError::Input("replay cannot be nested".into())),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(crate::Failure::Partial { outcome, message }) => {
            build(command, jobs, outcome, started).write(path)?;
            return Err(CliError::NodeLimit {
                message,
                report: path.to_path_buf(),
            });
        }
        Err(crate::Failure::Error(e)) => return Err(e),
    };
    let report = build(command, jobs, outcome, started);
    report.write(path)?;
    Ok((path.to_path_buf(), report))
}
