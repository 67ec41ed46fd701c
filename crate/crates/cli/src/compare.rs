//! `mfc compare`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use mfc_core::{
    compare_methods, AttackConfig, AttackMode, BaselineSpec, CompareConfig, ComparisonReport, Method, Norm,
};
use serde::{Deserialize, Serialize};

use crate::compress::{BudgetModeArg, SolverArgs};
use crate::{load_dataset, to_value, CliError, CommandResult, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackArg {
    /// Closed-form worst case; binary linear models only.
    Exact,
    Pgd,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub train: PathBuf,
    /// Evaluation set; defaults to the training set.
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "random,kcenter_greedy,mcs")]
    pub methods: Vec<Method>,
    #[arg(long)]
    pub budget: usize,
    #[arg(long, value_enum, default_value_t = BudgetModeArg::PerClass)]
    pub budget_mode: BudgetModeArg,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Seed of the random baseline and of model initialisation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value = "l2")]
    pub norm: Norm,
    #[arg(long, value_enum, default_value_t = AttackArg::Exact)]
    pub attack: AttackArg,
    /// PGD step size; defaults to eps / 4.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.5)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// CSV table to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Report path; defaults to `<out>.report.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl CompareArgs {
    pub fn attack_config(&self) -> AttackConfig {
        let base = AttackConfig::pgd(self.eps, self.norm).with_steps(self.steps);
        let base = match self.alpha {
            Some(a) => base.with_alpha(a),
            None => base,
        };
        AttackConfig {
            mode: match self.attack {
                AttackArg::Exact => AttackMode::ExactLinear,
                AttackArg::Pgd => AttackMode::Pgd,
            },
            ..base
        }
    }
}

fn table(report: &ComparisonReport) -> String {
    let mut out = String::from(
        "method,budget,budget_mode,size_mean,size_std,radius_mean,radius_std,\
         standard_mean,standard_std,robust_mean,robust_std\n",
    );
    for row in &report.rows {
        let budget = row.budget.map(|b| b.to_string()).unwrap_or_default();
        let mode = match row.budget_mode {
            Some(mfc_core::BudgetMode::PerClass) => "per_class",
            Some(mfc_core::BudgetMode::Total) => "total",
            None => "",
        };
        let _ = write!(out, "{},{budget},{mode}", row.method);
        for s in [
            &row.coreset_size,
            &row.radius,
            &row.standard_score,
            &row.robust_score,
        ] {
            let _ = write!(out, ",{:?},{:?}", s.mean, s.std);
        }
        out.push('\n');
    }
    out
}

pub(crate) fn run(args: &CompareArgs) -> CommandResult {
    let train_ds = load_dataset(&args.train)?;
    let test_ds = match &args.test {
        Some(p) => load_dataset(p)?,
        None => train_ds.clone(),
    };
    if args.methods.is_empty() {
        return Err(CliError::Input("--methods must name at least one method".into()).into());
    }
    let specs: Vec<BaselineSpec> = args
        .methods
        .iter()
        .map(|&m| BaselineSpec::new(m, args.budget, args.budget_mode.into(), args.seed))
        .collect();
    let cfg = CompareConfig {
        learning_rate: args.learning_rate,
        epochs: args.epochs,
        seed: args.seed,
        attack: args.attack_config(),
        repeats: args.repeats,
        solver: args.solver.config(),
    };
    let report = compare_methods(&train_ds, &test_ds, &specs, &cfg)?;
    std::fs::write(&args.out, table(&report))?;
    let seeds = (0..args.repeats as u64)
        .map(|r| args.seed.wrapping_add(r))
        .collect();
    Ok(Outcome {
        results: to_value(&report),
        seeds,
    })
}
