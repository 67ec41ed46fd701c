//! `mfc verify-bound`.

use std::path::PathBuf;

use clap::Args;
use mfc_core::{train, verify_bound, verify_cover, AttackConfig, LinearModel, Norm, TrainConfig, TrainData};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{load_cover, load_dataset, to_value, CliError, CommandResult, Outcome};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Cover-solution file written by `mfc compress`.
    #[arg(long)]
    pub cover: PathBuf,
    /// Perturbation radius.
    #[arg(long)]
    pub eps: f64,
    /// Attack norm; defaults to the norm stored in the cover.
    #[arg(long)]
    pub norm: Option<Norm>,
    /// Number of random linear models.
    #[arg(long, default_value_t = 100)]
    pub models: usize,
    /// Model `m` is drawn from seed `seed + m`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Standard deviation of the random weights.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Gradient steps on the generalized objective before evaluating; 0
    /// checks the random models as drawn.
    #[arg(long, default_value_t = 0)]
    pub train_epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    /// Report path; defaults to `<cover>.bound.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelBound {
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyResults {
    pub eps: f64,
    pub eta: f64,
    pub norm: Norm,
    pub n_points: usize,
    pub coreset_size: usize,
    /// Whether the `(eps + eta)`-balls around centers of different classes
    /// are disjoint.
    pub fattening_zip: bool,
    pub holds_for_all: bool,
    pub min_gap: f64,
    pub models: Vec<ModelBound>,
}

pub(crate) fn run(args: &VerifyArgs) -> CommandResult {
    let ds = load_dataset(&args.dataset)?;
    let sol = load_cover(&args.cover)?;
    let norm = args.norm.unwrap_or(sol.norm);
    if norm != sol.norm {
        return Err(CliError::Input(format!(
            "--norm {norm} differs from the cover's norm {}",
            sol.norm
        ))
        .into());
    }
    if args.models == 0 {
        return Err(CliError::Input("--models must be at least 1".into()).into());
    }
    if ds.num_classes() > 2 {
        return Err(CliError::Input("verify-bound supports binary datasets only".into()).into());
    }
    if !(args.eps >= 0.0 && args.eps.is_finite()) {
        return Err(CliError::Input("--eps must be finite and non-negative".into()).into());
    }
    if sol.n_points != ds.len() {
        return Err(CliError::Infeasible(format!(
            "cover was computed for {} points, dataset has {}",
            sol.n_points,
            ds.len()
        ))
        .into());
    }
    let report = verify_cover(&ds, &sol, norm);
    if !report.valid {
        return Err(CliError::Infeasible(format!(
            "cover does not cover the dataset at eta = {}: {} point(s) uncovered, achieved radius {}",
            sol.eta,
            report.violations.len(),
            report.achieved_radius
        ))
        .into());
    }
    let coreset = sol.coreset(&ds)?;
    let seeds: Vec<u64> = (0..args.models as u64)
        .map(|m| args.seed.wrapping_add(m))
        .collect();
    let models: Vec<ModelBound> = seeds
        .par_iter()
        .map(|&seed| {
            let mut model = LinearModel::random(ds.dim(), 2, args.scale, seed);
            if args.train_epochs > 0 {
                let cfg = TrainConfig::generalized(
                    args.learning_rate,
                    args.train_epochs,
                    seed,
                    AttackConfig::exact(args.eps, norm),
                    ds.len(),
                );
                model = train(
                    model,
                    TrainData::Coreset {
                        coreset: &coreset,
                        sol: &sol,
                    },
                    &cfg,
                )?
                .0;
            }
            let b = verify_bound(&model, &ds, &sol, args.eps, norm)?;
            Ok(ModelBound {
                seed,
                lhs: b.lhs,
                rhs: b.rhs,
                gap: b.gap,
                holds: b.holds,
            })
        })
        .collect::<mfc_core::Result<_>>()?;
    let results = VerifyResults {
        eps: args.eps,
        eta: sol.eta,
        norm,
        n_points: ds.len(),
        coreset_size: sol.len(),
        fattening_zip: mfc_core::check_fattening_zip(&ds, &sol, args.eps + sol.eta, norm),
        holds_for_all: models.iter().all(|m| m.holds),
        min_gap: models.iter().map(|m| m.gap).fold(f64::INFINITY, f64::min),
        models,
    };
    Ok(Outcome {
        results: to_value(&results),
        seeds,
    })
}
