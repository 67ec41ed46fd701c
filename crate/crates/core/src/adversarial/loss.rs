//! Empirical standard, adversarial and generalized adversarial losses, the
//! coreset bound check, and accuracies.

use serde::{Deserialize, Serialize};

use super::attack::{attack, linear_worst_case_loss, pgd_attack, AttackConfig, AttackMode};
use super::model::Classifier;
use crate::covering::{check_fattening_zip, verify_cover, CoverSolution};
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::metric::Norm;

/// Slack allowed when comparing the two sides of the coreset bound.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// How the inner maximum over the perturbation ball is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerMax {
    /// Closed form; binary linear models only.
    ExactLinear,
    /// Projected gradient ascent; a lower bound on the true maximum.
    Pgd { alpha: f64, steps: usize },
}

/// A loss value and whether its inner maximum was exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossEstimate {
    pub value: f64,
    pub exact: bool,
}

fn check_model<M: Classifier + ?Sized>(model: &M, ds: &LabeledDataset) -> Result<()> {
    if model.dim() != ds.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: ds.dim(),
        });
    }
    if ds.num_classes() > model.num_classes() {
        return Err(Error::InvalidConfig(format!(
            "dataset has {} classes but the model only {}",
            ds.num_classes(),
            model.num_classes()
        )));
    }
    Ok(())
}

/// Worst-case loss of one point at `radius`.
pub(crate) fn inner_max<M: Classifier + ?Sized>(
    model: &M,
    x: &[f64],
    label: usize,
    radius: f64,
    norm: Norm,
    inner: InnerMax,
) -> Result<f64> {
    match inner {
        InnerMax::ExactLinear => {
            let lin = model.as_linear().ok_or(Error::UnsupportedModel(
                "closed-form inner maximum needs a linear model",
            ))?;
            linear_worst_case_loss(lin, x, label, radius, norm)
        }
        InnerMax::Pgd { alpha, steps } => {
            let cfg = AttackConfig {
                eps: radius,
                alpha,
                steps,
                norm,
                mode: AttackMode::Pgd,
            };
            Ok(model.loss(&pgd_attack(model, x, label, &cfg), label))
        }
    }
}

/// `(1 / normalizer) * sum_i weight_i * max_{||delta|| <= radius} l(x_i + delta, y_i)`,
/// summed in index order.
fn weighted_adv_loss<M: Classifier + ?Sized>(
    model: &M,
    ds: &LabeledDataset,
    weights: Option<&[f64]>,
    normalizer: f64,
    radius: f64,
    norm: Norm,
    inner: InnerMax,
) -> Result<f64> {
    let mut total = 0.0;
    for (i, x) in ds.points().iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        total += w * inner_max(model, x, ds.label(i), radius, norm, inner)?;
    }
    Ok(total / normalizer)
}

/// Logistic loss on the signed margin for binary models, cross-entropy
/// otherwise.
pub fn margin_loss<M: Classifier + ?Sized>(model: &M, x: &[f64], label: usize) -> f64 {
    model.loss(x, label)
}

/// Mean clean loss over `ds`.
pub fn empirical_standard_loss<M: Classifier + ?Sized>(model: &M, ds: &LabeledDataset) -> Result<f64> {
    check_model(model, ds)?;
    let total: f64 = ds
        .points()
        .iter()
        .enumerate()
        .map(|(i, x)| model.loss(x, ds.label(i)))
        .sum();
    Ok(total / ds.len() as f64)
}

/// Mean worst-case loss over `eps`-balls around the points of `ds`.
pub fn empirical_adv_loss<M: Classifier + ?Sized>(
    model: &M,
    ds: &LabeledDataset,
    eps: f64,
    norm: Norm,
    inner: InnerMax,
) -> Result<LossEstimate> {
    check_model(model, ds)?;
    let value = weighted_adv_loss(model, ds, None, ds.len() as f64, eps, norm, inner)?;
    Ok(LossEstimate {
        value,
        exact: inner == InnerMax::ExactLinear,
    })
}

/// Weighted worst-case loss over the coreset at `radius` (normally
/// `eps + eta`): `(1 / total_n) * sum_j q_j * max_{||delta|| <= radius} l(x_j + delta, y_j)`.
///
/// `coreset` holds the selected points in `sol.selected` order. The weights
/// are not renormalised, so their total may exceed `total_n`.
pub fn generalized_adv_loss<M: Classifier + ?Sized>(
    model: &M,
    sol: &CoverSolution,
    coreset: &LabeledDataset,
    radius: f64,
    norm: Norm,
    total_n: usize,
    inner: InnerMax,
) -> Result<LossEstimate> {
    if sol.weights.is_empty() {
        return Err(Error::MissingWeights);
    }
    if sol.weights.len() != coreset.len() {
        return Err(Error::InvalidConfig(format!(
            "{} weights for a coreset of {} points",
            sol.weights.len(),
            coreset.len()
        )));
    }
    if radius.is_nan() || radius < 0.0 || total_n == 0 {
        return Err(Error::InvalidConfig(
            "radius must be non-negative and total_n positive".into(),
        ));
    }
    check_model(model, coreset)?;
    let weights = sol.weights_f64();
    let value = weighted_adv_loss(
        model,
        coreset,
        Some(&weights),
        total_n as f64,
        radius,
        norm,
        inner,
    )?;
    Ok(LossEstimate {
        value,
        exact: inner == InnerMax::ExactLinear,
    })
}

/// Both sides of the coreset bound for one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Adversarial loss over the full data at radius `eps`.
    pub lhs: f64,
    /// Generalized adversarial loss over the coreset at radius `eps + eta`.
    pub rhs: f64,
    pub holds: bool,
    /// `rhs - lhs`.
    pub gap: f64,
    /// Whether the `(eps + eta)`-fattened coreset classes are disjoint.
    pub fattening_zip: bool,
}

/// Evaluate `L_adv(f, T) <= G_adv(f, S)` with exact inner maxima.
pub fn verify_bound<M: Classifier + ?Sized>(
    model: &M,
    ds: &LabeledDataset,
    sol: &CoverSolution,
    eps: f64,
    norm: Norm,
) -> Result<BoundReport> {
    let report = verify_cover(ds, sol, norm);
    if !report.valid {
        return Err(Error::InvalidCover {
            violations: report.violations,
        });
    }
    let lhs = empirical_adv_loss(model, ds, eps, norm, InnerMax::ExactLinear)?.value;
    let coreset = sol.coreset(ds)?;
    let radius = eps + sol.eta;
    let rhs = generalized_adv_loss(
        model,
        sol,
        &coreset,
        radius,
        norm,
        ds.len(),
        InnerMax::ExactLinear,
    )?
    .value;
    Ok(BoundReport {
        lhs,
        rhs,
        holds: lhs <= rhs + BOUND_TOLERANCE,
        gap: rhs - lhs,
        fattening_zip: check_fattening_zip(ds, sol, radius, norm),
    })
}

/// Fraction of `ds` classified correctly, on clean inputs when `attack_cfg`
/// is `None` and under attack otherwise.
///
/// Linear models are always attacked with their exact worst case, so their
/// robust accuracy is exact. Other models use `attack_cfg.mode`, which makes
/// the result an upper bound on the true robust accuracy.
pub fn accuracy<M: Classifier + ?Sized>(
    model: &M,
    ds: &LabeledDataset,
    attack_cfg: Option<&AttackConfig>,
) -> Result<f64> {
    check_model(model, ds)?;
    let mut correct = 0usize;
    for (i, x) in ds.points().iter().enumerate() {
        let y = ds.label(i);
        let ok = match (attack_cfg, model.as_linear()) {
            (None, _) => model.is_correct(x, y),
            (Some(cfg), Some(lin)) => lin.robustly_correct(x, y, cfg.eps, cfg.norm),
            (Some(cfg), None) => model.is_correct(&attack(model, x, y, cfg)?, y),
        };
        correct += usize::from(ok);
    }
    Ok(correct as f64 / ds.len() as f64)
}
