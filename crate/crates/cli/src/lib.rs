//! The `mfc` command line: compress datasets into minimal coresets, certify
//! the coreset loss bound, compare compression methods, generate synthetic
//! data and plot 2-d covers.
//!
//! Every command writes a [`RunReport`] whose `config` field deserialises
//! back into the [`Command`] that produced it, so `mfc replay` can rerun it.
//! Stdout only ever carries the path of that report.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O or other failure |
//! | 2 | unreadable input or invalid flags |
//! | 3 | infeasible request or invalid cover |
//! | 4 | exact solver node limit hit; the incumbent was saved |
//! | 5 | replay produced a different payload |

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

pub mod compare;
pub mod compress;
pub mod gen;
pub mod plot;
pub mod replay;
pub mod report;
pub mod verify;

pub use report::RunReport;

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[command(
    name = "mfc",
    version,
    about = "Minimal finite coverings and coreset certificates"
)]
pub struct Cli {
    /// Worker threads for parallel sections (0 = all cores). Results do not
    /// depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Select a minimal label-respecting coreset.
    Compress(compress::CompressArgs),
    /// Check the coreset loss bound for random linear models.
    VerifyBound(verify::VerifyArgs),
    /// Score compression methods by training on their output.
    Compare(compare::CompareArgs),
    /// Write a synthetic dataset.
    GenData(gen::GenArgs),
    /// Draw a 2-d dataset and its cover as SVG.
    Plot(plot::PlotArgs),
    /// Rerun the command recorded in a report and compare payloads.
    Replay(replay::ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Compress(_) => "compress",
            Command::VerifyBound(_) => "verify-bound",
            Command::Compare(_) => "compare",
            Command::GenData(_) => "gen-data",
            Command::Plot(_) => "plot",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{message}")]
    NodeLimit { message: String, report: PathBuf },
    #[error("replay mismatch: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::NodeLimit { .. } => 4,
            CliError::Mismatch(_) => 5,
        }
    }

    /// Report written despite the failure, if any.
    pub fn report(&self) -> Option<&Path> {
        match self {
            CliError::NodeLimit { report, .. } => Some(report),
            _ => None,
        }
    }
}

impl From<mfc_core::Error> for CliError {
    fn from(e: mfc_core::Error) -> Self {
        use mfc_core::Error as E;
        match e {
            E::Io(_) | E::Diverged { .. } => CliError::Other(e.to_string()),
            E::BudgetBelowClassCount { .. } | E::BudgetExceedsClass { .. } | E::InvalidCover { .. } => {
                CliError::Infeasible(e.to_string())
            }
            E::Method { ref source, .. } => match CliError::from(clone_kind(source)) {
                CliError::Input(_) => CliError::Input(e.to_string()),
                CliError::Infeasible(_) => CliError::Infeasible(e.to_string()),
                _ => CliError::Other(e.to_string()),
            },
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// A stand-in with the same exit-code class as `e`.
fn clone_kind(e: &mfc_core::Error) -> mfc_core::Error {
    use mfc_core::Error as E;
    match e {
        E::Io(io) => E::Io(std::io::Error::new(io.kind(), io.to_string())),
        E::Diverged { epoch } => E::Diverged { epoch: *epoch },
        E::BudgetBelowClassCount { budget, classes } => E::BudgetBelowClassCount {
            budget: *budget,
            classes: *classes,
        },
        E::BudgetExceedsClass { class, budget, size } => E::BudgetExceedsClass {
            class: *class,
            budget: *budget,
            size: *size,
        },
        E::InvalidCover { violations } => E::InvalidCover {
            violations: violations.clone(),
        },
        E::Method { source, .. } => clone_kind(source),
        other => E::InvalidConfig(other.to_string()),
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a command returns before its report is written.
pub struct Outcome {
    pub results: serde_json::Value,
    pub seeds: Vec<u64>,
}

/// A command failure, possibly with partial results worth reporting.
pub(crate) enum Failure {
    Partial { outcome: Outcome, message: String },
    Error(CliError),
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Error(e)
    }
}

impl From<mfc_core::Error> for Failure {
    fn from(e: mfc_core::Error) -> Self {
        Failure::Error(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(e.into())
    }
}

pub(crate) type CommandResult = Result<Outcome, Failure>;

/// Default report path for a command writing `out`.
pub fn report_path_for(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".report.json");
    PathBuf::from(name)
}

/// Execute `cli` and return the path of the report it wrote.
pub fn run(cli: &Cli) -> CliResult<PathBuf> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Other(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Replay(args) => replay::run(args, cli.jobs),
        command => report::execute(command, cli.jobs),
    })
}

pub(crate) fn load_dataset(path: &Path) -> CliResult<mfc_core::LabeledDataset> {
    mfc_core::io::read_dataset(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub(crate) fn load_cover(path: &Path) -> CliResult<mfc_core::CoverSolution> {
    mfc_core::io::read_cover(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub(crate) fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report values serialise")
}
