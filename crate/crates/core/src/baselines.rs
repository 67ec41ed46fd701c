//! Random and k-center coresets, and a harness that scores compression
//! methods by training on their output.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversarial::{accuracy, train, AttackConfig, LinearModel, TrainConfig, TrainData};
use crate::covering::{
    solve_k_mcs, solve_k_mcs_per_class, CoverSolution, SolverConfig, SolverKind, DEFAULT_DELTA,
};
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::metric::Norm;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Random,
    KcenterGreedy,
    Mcs,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::KcenterGreedy => "kcenter_greedy",
            Method::Mcs => "mcs",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" | "rand" => Ok(Method::Random),
            "kcenter_greedy" | "kcenter" | "kcenter-greedy" => Ok(Method::KcenterGreedy),
            "mcs" => Ok(Method::Mcs),
            _ => Err(Error::InvalidConfig(format!("unknown method `{s}`"))),
        }
    }
}

/// Whether `budget` counts points per class or in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    #[default]
    PerClass,
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineSpec {
    pub method: Method,
    pub budget: usize,
    pub budget_mode: BudgetMode,
    pub seed: u64,
}

impl BaselineSpec {
    pub fn new(method: Method, budget: usize, budget_mode: BudgetMode, seed: u64) -> Self {
        BaselineSpec {
            method,
            budget,
            budget_mode,
            seed,
        }
    }

    pub fn validate(&self, ds: &LabeledDataset) -> Result<()> {
        let classes = ds.present_classes();
        match self.budget_mode {
            BudgetMode::PerClass => {
                if self.budget == 0 {
                    return Err(Error::BudgetBelowClassCount {
                        budget: 0,
                        classes: 1,
                    });
                }
                for class in classes {
                    let size = ds.class_indices(class).len();
                    if self.budget > size {
                        return Err(Error::BudgetExceedsClass {
                            class,
                            budget: self.budget,
                            size,
                        });
                    }
                }
            }
            BudgetMode::Total => {
                if self.budget < classes.len() {
                    return Err(Error::BudgetBelowClassCount {
                        budget: self.budget,
                        classes: classes.len(),
                    });
                }
                if self.budget > ds.len() {
                    return Err(Error::InvalidConfig(format!(
                        "budget {} exceeds the dataset size {}",
                        self.budget,
                        ds.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Uniform sampling without replacement.
///
/// Per-class mode samples `budget` points inside each class. Total mode first
/// draws one point per class, then fills the rest of the budget uniformly
/// from the remaining points.
pub fn random_coreset(ds: &LabeledDataset, spec: &BaselineSpec, norm: Norm) -> Result<CoverSolution> {
    spec.validate(ds)?;
    let mut rng = rng::stream(spec.seed);
    let mut selected = Vec::with_capacity(spec.budget);
    let per_class = match spec.budget_mode {
        BudgetMode::PerClass => spec.budget,
        BudgetMode::Total => 1,
    };
    for class in ds.present_classes() {
        let idx = ds.class_indices(class);
        selected.extend(sample(&mut rng, idx.len(), per_class).into_iter().map(|i| idx[i]));
    }
    if spec.budget_mode == BudgetMode::Total {
        let mut taken = vec![false; ds.len()];
        selected.iter().for_each(|&i| taken[i] = true);
        let rest: Vec<usize> = (0..ds.len()).filter(|&i| !taken[i]).collect();
        let extra = spec.budget - selected.len();
        selected.extend(sample(&mut rng, rest.len(), extra).into_iter().map(|i| rest[i]));
    }
    CoverSolution::from_selection(ds, selected, norm, SolverKind::Random)
}

/// Farthest-first traversal, seeded at the lowest index of each class.
///
/// Distances are always to the nearest same-class center. Per-class mode runs
/// the traversal inside each class; total mode starts from one center per
/// class and then adds the globally farthest point. Ties go to the lowest
/// index.
pub fn kcenter_greedy(ds: &LabeledDataset, spec: &BaselineSpec, norm: Norm) -> Result<CoverSolution> {
    spec.validate(ds)?;
    let pts = ds.points();
    let mut dist = vec![f64::INFINITY; ds.len()];
    let mut selected = Vec::with_capacity(spec.budget);
    let add = |c: usize, dist: &mut [f64], selected: &mut Vec<usize>| {
        selected.push(c);
        let label = ds.label(c);
        for &i in ds.class_indices(label) {
            dist[i] = dist[i].min(norm.dist(pts.point(i), pts.point(c)));
        }
    };
    let farthest = |candidates: &[usize], dist: &[f64]| {
        let mut best = candidates[0];
        for &i in candidates {
            if dist[i] > dist[best] {
                best = i;
            }
        }
        best
    };
    for class in ds.present_classes() {
        add(ds.class_indices(class)[0], &mut dist, &mut selected);
    }
    match spec.budget_mode {
        BudgetMode::PerClass => {
            for class in ds.present_classes() {
                let idx = ds.class_indices(class);
                for _ in 1..spec.budget {
                    let next = farthest(idx, &dist);
                    add(next, &mut dist, &mut selected);
                }
            }
        }
        BudgetMode::Total => {
            let all: Vec<usize> = (0..ds.len()).collect();
            while selected.len() < spec.budget {
                let next = farthest(&all, &dist);
                add(next, &mut dist, &mut selected);
            }
        }
    }
    CoverSolution::from_selection(ds, selected, norm, SolverKind::KCenter)
}

/// Run the method named by `spec`. MCS solves the size-constrained problem
/// with weights; the baselines carry unit weights.
pub fn compress(
    ds: &LabeledDataset,
    spec: &BaselineSpec,
    norm: Norm,
    solver: &SolverConfig,
) -> Result<CoverSolution> {
    match spec.method {
        Method::Random => random_coreset(ds, spec, norm),
        Method::KcenterGreedy => kcenter_greedy(ds, spec, norm),
        Method::Mcs => {
            spec.validate(ds)?;
            match spec.budget_mode {
                BudgetMode::PerClass => solve_k_mcs_per_class(ds, spec.budget, norm, DEFAULT_DELTA, solver),
                BudgetMode::Total => solve_k_mcs(ds, spec.budget, norm, DEFAULT_DELTA, solver),
            }
        }
    }
}

/// Training and evaluation settings shared by every row of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Model initialisation seed; repeat `r` uses `seed + r`.
    pub seed: u64,
    /// Used both for adversarial training and for the robust score.
    pub attack: AttackConfig,
    pub repeats: usize,
    pub solver: SolverConfig,
}

/// Mean and sample standard deviation of a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Zero for a single value.
    pub std: f64,
    pub values: Vec<f64>,
}

impl Stat {
    pub fn from_values(values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Stat { mean, std, values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    /// `full` for the uncompressed reference, otherwise the method name.
    pub method: String,
    pub budget: Option<usize>,
    pub budget_mode: Option<BudgetMode>,
    pub coreset_size: Stat,
    /// Achieved covering radius `d(T -> S)`.
    pub radius: Stat,
    /// Clean test accuracy after standard training.
    pub standard_score: Stat,
    /// Robust test accuracy after adversarial training.
    pub robust_score: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub eps: f64,
    pub norm: Norm,
    pub repeats: usize,
    /// `full` first, then one row per spec in the given order.
    pub rows: Vec<ComparisonRow>,
}

struct Trial {
    size: f64,
    radius: f64,
    standard: f64,
    robust: f64,
}

fn init_model(train_ds: &LabeledDataset, seed: u64) -> LinearModel {
    LinearModel::random(train_ds.dim(), train_ds.num_classes().max(2), 0.01, seed)
}

fn score(
    train_ds: &LabeledDataset,
    test_ds: &LabeledDataset,
    sol: Option<&CoverSolution>,
    generalized: bool,
    cfg: &CompareConfig,
    seed: u64,
) -> Result<Trial> {
    let std_cfg = TrainConfig::standard(cfg.learning_rate, cfg.epochs, seed);
    let adv_cfg = TrainConfig::adversarial(cfg.learning_rate, cfg.epochs, seed, cfg.attack);
    let coreset = sol.map(|s| s.coreset(train_ds)).transpose()?;
    let data = coreset.as_ref().unwrap_or(train_ds);
    let (standard_model, _) = train(init_model(train_ds, seed), TrainData::Full(data), &std_cfg)?;
    let robust_model = match (sol, &coreset) {
        (Some(s), Some(core)) if generalized => {
            let gen_cfg =
                TrainConfig::generalized(cfg.learning_rate, cfg.epochs, seed, cfg.attack, train_ds.len());
            train(
                init_model(train_ds, seed),
                TrainData::Coreset {
                    coreset: core,
                    sol: s,
                },
                &gen_cfg,
            )?
            .0
        }
        _ => train(init_model(train_ds, seed), TrainData::Full(data), &adv_cfg)?.0,
    };
    Ok(Trial {
        size: data.len() as f64,
        radius: sol.map_or(0.0, |s| s.eta),
        standard: accuracy(&standard_model, test_ds, None)?,
        robust: accuracy(&robust_model, test_ds, Some(&cfg.attack))?,
    })
}

fn row(method: &str, spec: Option<&BaselineSpec>, trials: Vec<Trial>) -> ComparisonRow {
    let col = |f: fn(&Trial) -> f64| Stat::from_values(trials.iter().map(f).collect());
    ComparisonRow {
        method: method.to_string(),
        budget: spec.map(|s| s.budget),
        budget_mode: spec.map(|s| s.budget_mode),
        coreset_size: col(|t| t.size),
        radius: col(|t| t.radius),
        standard_score: col(|t| t.standard),
        robust_score: col(|t| t.robust),
    }
}

/// Compress `train_ds` with every spec, train a standard and an adversarial
/// linear model on each result, and score them on `test_ds`.
///
/// MCS rows train with the generalized objective at radius `eps + eta`;
/// the others train adversarially at `eps` on their unweighted coreset.
/// Repeat `r` shifts both the spec seed and the model seed by `r`. Trials run
/// in parallel and rows keep the order of `specs`.
pub fn compare_methods(
    train_ds: &LabeledDataset,
    test_ds: &LabeledDataset,
    specs: &[BaselineSpec],
    cfg: &CompareConfig,
) -> Result<ComparisonReport> {
    if train_ds.dim() != test_ds.dim() {
        return Err(Error::DimensionMismatch {
            expected: train_ds.dim(),
            found: test_ds.dim(),
        });
    }
    if cfg.repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be at least 1".into()));
    }
    cfg.attack.validate()?;
    let norm = cfg.attack.norm;
    let repeats = cfg.repeats as u64;

    let tag = |method: &str| {
        let method = method.to_string();
        move |e: Error| Error::Method {
            method: method.clone(),
            source: Box::new(e),
        }
    };
    let full: Vec<Trial> = (0..repeats)
        .into_par_iter()
        .map(|r| score(train_ds, test_ds, None, false, cfg, cfg.seed.wrapping_add(r)).map_err(tag("full")))
        .collect::<Result<_>>()?;
    let mut rows = vec![row("full", None, full)];

    let jobs: Vec<(usize, u64)> = (0..specs.len())
        .flat_map(|s| (0..repeats).map(move |r| (s, r)))
        .collect();
    let trials: Vec<Trial> = jobs
        .par_iter()
        .map(|&(s, r)| {
            let mut spec = specs[s];
            spec.seed = spec.seed.wrapping_add(r);
            let sol = compress(train_ds, &spec, norm, &cfg.solver).map_err(tag(spec.method.as_str()))?;
            score(
                train_ds,
                test_ds,
                Some(&sol),
                spec.method == Method::Mcs,
                cfg,
                cfg.seed.wrapping_add(r),
            )
            .map_err(tag(spec.method.as_str()))
        })
        .collect::<Result<_>>()?;
    let mut trials = trials.into_iter();
    for spec in specs {
        let chunk: Vec<Trial> = trials.by_ref().take(cfg.repeats).collect();
        rows.push(row(spec.method.as_str(), Some(spec), chunk));
    }
    Ok(ComparisonReport {
        eps: cfg.attack.eps,
        norm,
        repeats: cfg.repeats,
        rows,
    })
}
