//! `mfc compress`.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use mfc_core::covering::{SolverMode, DEFAULT_DELTA};
use mfc_core::{
    solve_eta_mcs, solve_k_mcs, solve_k_mcs_per_class, BudgetMode, CoverSolution, Error, LabeledDataset,
    Norm, SolverConfig, SolverKind, WeightMode,
};
use serde::{Deserialize, Serialize};

use crate::{load_dataset, to_value, CommandResult, Failure, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetModeArg {
    PerClass,
    Total,
}

impl From<BudgetModeArg> for BudgetMode {
    fn from(m: BudgetModeArg) -> Self {
        match m {
            BudgetModeArg::PerClass => BudgetMode::PerClass,
            BudgetModeArg::Total => BudgetMode::Total,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverArg {
    Exact,
    Greedy,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightArg {
    Multiplicity,
    Partition,
}

impl From<WeightArg> for WeightMode {
    fn from(w: WeightArg) -> Self {
        match w {
            WeightArg::Multiplicity => WeightMode::Multiplicity,
            WeightArg::Partition => WeightMode::Partition,
        }
    }
}

/// Solver flags shared by the commands that compress.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    pub solver: SolverArg,
    /// Search-node budget of the exact solver.
    #[arg(long, default_value_t = 20_000_000)]
    pub node_limit: u64,
    /// Largest class the auto solver still solves exactly.
    #[arg(long, default_value_t = 400)]
    pub auto_threshold: usize,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            mode: match self.solver {
                SolverArg::Exact => SolverMode::Exact,
                SolverArg::Greedy => SolverMode::Greedy,
                SolverArg::Auto => SolverMode::Auto,
            },
            exact_node_limit: self.node_limit,
            auto_threshold: self.auto_threshold,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CompressArgs {
    /// Dataset file (CSV, or binary when the name ends in `.bin`).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "l2")]
    pub norm: Norm,
    /// Fixed covering radius.
    #[arg(long, required_unless_present = "k", conflicts_with = "k")]
    pub eta: Option<f64>,
    /// Fixed number of centers; the radius is minimised.
    #[arg(long)]
    pub k: Option<usize>,
    /// Whether `--k` counts centers per class or in total.
    #[arg(long, value_enum, default_value_t = BudgetModeArg::PerClass)]
    pub budget_mode: BudgetModeArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Width at which the radius bisection stops.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = WeightArg::Multiplicity)]
    pub weights: WeightArg,
    /// Cover-solution file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Report path; defaults to `<out>.report.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: usize,
    pub size: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompressResults {
    /// `ok`, or `node_limit` when the saved cover is the solver's incumbent.
    pub status: String,
    pub cover: PathBuf,
    pub n_points: usize,
    pub size: usize,
    pub eta: f64,
    pub solver: SolverKind,
    pub norm: Norm,
    pub weight_total: u64,
    pub per_class: Vec<ClassSummary>,
    pub search: Option<mfc_core::covering::RadiusSearch>,
    pub selected: Vec<usize>,
}

fn solve(ds: &LabeledDataset, args: &CompressArgs, cfg: &SolverConfig) -> mfc_core::Result<CoverSolution> {
    match (args.eta, args.k) {
        (Some(eta), _) => solve_eta_mcs(ds, eta, args.norm, cfg),
        (None, Some(k)) => match BudgetMode::from(args.budget_mode) {
            BudgetMode::PerClass => solve_k_mcs_per_class(ds, k, args.norm, args.delta, cfg),
            BudgetMode::Total => solve_k_mcs(ds, k, args.norm, args.delta, cfg),
        },
        (None, None) => Err(Error::InvalidConfig("one of --eta or --k is required".into())),
    }
}

/// Best cover known after the exact solver gave up.
fn incumbent(
    ds: &LabeledDataset,
    args: &CompressArgs,
    partial: Vec<usize>,
) -> mfc_core::Result<CoverSolution> {
    match args.eta {
        Some(eta) => {
            let mut sol = CoverSolution::from_selection(ds, partial, args.norm, SolverKind::Greedy)?;
            sol.eta = eta;
            Ok(sol)
        }
        None => solve(ds, args, &SolverConfig::greedy()),
    }
}

fn results(status: &str, args: &CompressArgs, sol: &CoverSolution) -> CompressResults {
    CompressResults {
        status: status.into(),
        cover: args.out.clone(),
        n_points: sol.n_points,
        size: sol.len(),
        eta: sol.eta,
        solver: sol.solver,
        norm: sol.norm,
        weight_total: sol.weights.iter().sum(),
        per_class: sol
            .per_class
            .iter()
            .map(|c| ClassSummary {
                class: c.class,
                size: c.selected.len(),
                radius: c.radius,
            })
            .collect(),
        search: sol.search,
        selected: sol.selected.clone(),
    }
}

pub(crate) fn run(args: &CompressArgs) -> CommandResult {
    let ds = load_dataset(&args.input)?;
    let cfg = args.solver.config();
    let weights = WeightMode::from(args.weights);
    match solve(&ds, args, &cfg) {
        Ok(mut sol) => {
            if weights != WeightMode::Multiplicity {
                sol.reweight(&ds, weights)?;
            }
            mfc_core::io::write_cover(&args.out, &sol)?;
            Ok(Outcome {
                results: to_value(&results("ok", args, &sol)),
                seeds: Vec::new(),
            })
        }
        Err(Error::NodeLimitExceeded {
            limit,
            incumbent: partial,
        }) => {
            let mut sol = incumbent(&ds, args, partial)?;
            sol.reweight(&ds, weights)?;
            mfc_core::io::write_cover(&args.out, &sol)?;
            Err(Failure::Partial {
                outcome: Outcome {
                    results: to_value(&results("node_limit", args, &sol)),
                    seeds: Vec::new(),
                },
                message: format!(
                    "exact solver hit its node limit of {limit}; saved a {}-point incumbent to {}",
                    sol.len(),
                    args.out.display()
                ),
            })
        }
        Err(e) => Err(e.into()),
    }
}
