//! `mfc replay`.

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::report::{execute_to, report_path, RunReport};
use crate::{CliError, CliResult, Command};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Report of the run to repeat.
    #[arg(long)]
    pub report: PathBuf,
    /// Where the new report goes; defaults to `<report>.replay.json`.
    #[arg(long)]
    pub out_report: Option<PathBuf>,
}

/// Rerun the recorded command (its output files are rewritten in place) and
/// fail with exit code 5 unless the new payload is byte-identical.
pub(crate) fn run(args: &ReplayArgs, jobs: usize) -> CliResult<PathBuf> {
    let original = RunReport::read(&args.report)?;
    let command = original.command()?;
    if matches!(command, Command::Replay(_)) {
        return Err(CliError::Input("cannot replay a replay".into()));
    }
    let path = report_path(&Command::Replay(args.clone()));
    let (path, fresh) = execute_to(&command, jobs, &path)?;
    if fresh.payload() != original.payload() {
        return Err(CliError::Mismatch(format!(
            "results of `{}` differ from {}",
            original.command,
            args.report.display()
        )));
    }
    Ok(path)
}
