//! Minimal coresets: label-respecting coverings of a dataset by a subset of
//! its own points.
//!
//! Each class is covered independently, so every selected center inherits
//! its label from the data and `S = S_0 ∪ S_1 ∪ ...`.

mod adjacency;
mod solver;

use serde::{Deserialize, Serialize};

pub use adjacency::{build_adjacency, AdjacencyMatrix};
pub use solver::{exact_min_cover, greedy_cover, min_cover_size};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::metric::{diameter, Norm, PointSet};

/// Default bisection tolerance for the radius search.
pub const DEFAULT_DELTA: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMode {
    Exact,
    Greedy,
    /// Exact for classes with at most `auto_threshold` points, greedy above.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mode: SolverMode,
    pub exact_node_limit: u64,
    pub auto_threshold: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: SolverMode::Auto,
            exact_node_limit: 20_000_000,
            auto_threshold: 400,
        }
    }
}

impl SolverConfig {
    pub fn exact() -> Self {
        SolverConfig {
            mode: SolverMode::Exact,
            ..Default::default()
        }
    }

    pub fn greedy() -> Self {
        SolverConfig {
            mode: SolverMode::Greedy,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.exact_node_limit == 0 || self.auto_threshold == 0 {
            return Err(Error::InvalidConfig(
                "exact_node_limit and auto_threshold must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn uses_exact(&self, class_size: usize) -> bool {
        match self.mode {
            SolverMode::Exact => true,
            SolverMode::Greedy => false,
            SolverMode::Auto => class_size <= self.auto_threshold,
        }
    }
}

/// Which procedure produced a selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Greedy,
    Random,
    #[serde(rename = "kcenter")]
    KCenter,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Greedy => "greedy",
            SolverKind::Random => "random",
            SolverKind::KCenter => "kcenter",
        }
    }
}

/// How the weight `q` of a center counts the points in its ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// Every same-class point inside the closed `eta`-ball, so a point in two
    /// balls counts twice.
    #[default]
    Multiplicity,
    /// Each point counts once, for its nearest selected center (ties to the
    /// lowest index; centers count for themselves).
    Partition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCover {
    pub class: usize,
    /// Global dataset indices, ascending.
    pub selected: Vec<usize>,
    /// `d(T_c -> S_c)`.
    pub radius: f64,
}

/// Record of a bisection over the covering radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusSearch {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSolution {
    /// Selected dataset indices, ascending.
    pub selected: Vec<usize>,
    /// Radius the weights and the cover guarantee refer to.
    pub eta: f64,
    /// `q` for each entry of `selected`. Empty when not computed.
    pub weights: Vec<u64>,
    pub weight_mode: WeightMode,
    pub solver: SolverKind,
    pub norm: Norm,
    /// Size of the dataset the solution was computed for.
    pub n_points: usize,
    pub per_class: Vec<ClassCover>,
    pub search: Option<RadiusSearch>,
}

impl CoverSolution {
    /// Wrap an arbitrary selection. `eta` becomes the achieved radius
    /// `d(T -> S)` and every weight is 1.
    pub fn from_selection(
        ds: &LabeledDataset,
        mut selected: Vec<usize>,
        norm: Norm,
        solver: SolverKind,
    ) -> Result<Self> {
        selected.sort_unstable();
        selected.dedup();
        if selected.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(&bad) = selected.iter().find(|&&i| i >= ds.len()) {
            return Err(Error::InvalidConfig(format!("selected index {bad} out of range")));
        }
        let per_class = class_covers(ds, &selected, norm);
        let eta = per_class.iter().map(|c| c.radius).fold(0.0, f64::max);
        Ok(CoverSolution {
            weights: vec![1; selected.len()],
            selected,
            eta,
            weight_mode: WeightMode::Multiplicity,
            solver,
            norm,
            n_points: ds.len(),
            per_class,
            search: None,
        })
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    /// The selected points with their labels, in `selected` order.
    pub fn coreset(&self, ds: &LabeledDataset) -> Result<LabeledDataset> {
        ds.subset(&self.selected)
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|&q| q as f64).collect()
    }

    /// Recompute `weights` at `self.eta` under `mode`.
    pub fn reweight(&mut self, ds: &LabeledDataset, mode: WeightMode) -> Result<()> {
        self.weight_mode = mode;
        self.weights = compute_weights(ds, self, self.norm, mode)?;
        Ok(())
    }
}

/// Outcome of [`verify_cover`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub valid: bool,
    /// Largest distance from a point to its nearest same-class center;
    /// infinite when a class has no center.
    pub achieved_radius: f64,
    /// Points with no same-class center within `eta`, ascending.
    pub violations: Vec<usize>,
}

fn class_covers(ds: &LabeledDataset, selected: &[usize], norm: Norm) -> Vec<ClassCover> {
    ds.present_classes()
        .into_iter()
        .map(|class| {
            let centers: Vec<usize> = selected
                .iter()
                .copied()
                .filter(|&s| ds.label(s) == class)
                .collect();
            let radius = ds
                .class_indices(class)
                .iter()
                .map(|&i| nearest_center(ds, i, &centers, norm).1)
                .fold(0.0, f64::max);
            ClassCover {
                class,
                selected: centers,
                radius,
            }
        })
        .collect()
}

/// Nearest center (lowest index on ties) and its distance; infinite if none.
fn nearest_center(ds: &LabeledDataset, i: usize, centers: &[usize], norm: Norm) -> (Option<usize>, f64) {
    let x = ds.points().point(i);
    let mut best = (None, f64::INFINITY);
    for &c in centers {
        let d = norm.dist(x, ds.points().point(c));
        if d < best.1 {
            best = (Some(c), d);
        }
    }
    best
}

fn check_radius(eta: f64) -> Result<()> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "radius must be finite and non-negative, got {eta}"
        )));
    }
    Ok(())
}

/// Minimum cover of one class at radius `eta`, in class-local indices.
fn cover_points(
    points: &PointSet,
    eta: f64,
    norm: Norm,
    cfg: &SolverConfig,
) -> Result<(Vec<usize>, SolverKind)> {
    let adj = build_adjacency(points, eta, norm);
    if cfg.uses_exact(points.len()) {
        Ok((exact_min_cover(&adj, cfg.exact_node_limit)?, SolverKind::Exact))
    } else {
        Ok((greedy_cover(&adj), SolverKind::Greedy))
    }
}

/// Minimum label-respecting coreset with covering radius `eta`.
///
/// Weights are filled with [`WeightMode::Multiplicity`]. When the exact
/// solver runs out of nodes the error carries global dataset indices.
pub fn solve_eta_mcs(ds: &LabeledDataset, eta: f64, norm: Norm, cfg: &SolverConfig) -> Result<CoverSolution> {
    check_radius(eta)?;
    cfg.validate()?;
    let mut selected = Vec::new();
    let mut all_exact = true;
    let classes = ds.present_classes();
    for (c, &class) in classes.iter().enumerate() {
        let idx = ds.class_indices(class);
        let points = ds.points().select(idx);
        match cover_points(&points, eta, norm, cfg) {
            Ok((local, kind)) => {
                all_exact &= kind == SolverKind::Exact;
                selected.extend(local.into_iter().map(|l| idx[l]));
            }
            Err(Error::NodeLimitExceeded { limit, incumbent }) => {
                selected.extend(incumbent.into_iter().map(|l| idx[l]));
                for &rest in &classes[c + 1..] {
                    let idx = ds.class_indices(rest);
                    let adj = build_adjacency(&ds.points().select(idx), eta, norm);
                    selected.extend(greedy_cover(&adj).into_iter().map(|l| idx[l]));
                }
                selected.sort_unstable();
                return Err(Error::NodeLimitExceeded {
                    limit,
                    incumbent: selected,
                });
            }
            Err(e) => return Err(e),
        }
    }
    selected.sort_unstable();
    let per_class = class_covers(ds, &selected, norm);
    let mut sol = CoverSolution {
        selected,
        eta,
        weights: Vec::new(),
        weight_mode: WeightMode::Multiplicity,
        solver: if all_exact {
            SolverKind::Exact
        } else {
            SolverKind::Greedy
        },
        norm,
        n_points: ds.len(),
        per_class,
        search: None,
    };
    sol.weights = compute_weights(ds, &sol, norm, WeightMode::Multiplicity)?;
    Ok(sol)
}

/// Whether a label-respecting cover with at most `k` centers in total exists
/// at radius `eta`. Any spare budget can be padded with extra points, so this
/// also decides whether exactly `k` centers suffice.
pub fn feasible_with_k(
    ds: &LabeledDataset,
    eta: f64,
    k: usize,
    norm: Norm,
    cfg: &SolverConfig,
) -> Result<bool> {
    check_radius(eta)?;
    cfg.validate()?;
    let classes = ds.present_classes();
    if k < classes.len() {
        return Ok(false);
    }
    let mut used = 0usize;
    for (c, &class) in classes.iter().enumerate() {
        let idx = ds.class_indices(class);
        let reserve = classes.len() - c - 1;
        let cap = k - used - reserve;
        let points = ds.points().select(idx);
        let adj = build_adjacency(&points, eta, norm);
        let size = if cfg.uses_exact(idx.len()) {
            min_cover_size(&adj, cfg.exact_node_limit, Some(cap))?
        } else {
            Some(greedy_cover(&adj).len()).filter(|&s| s <= cap)
        };
        match size {
            Some(s) => used += s,
            None => return Ok(false),
        }
    }
    Ok(used <= k)
}

/// Smallest-radius coreset with at most `k` centers in total, by bisection
/// on the radius.
///
/// The search starts from `[0, R]` with `R` the largest class diameter and
/// halves the bracket until it is at most `delta` wide. The returned
/// solution is the cover at the final upper end, with `eta` set to its
/// achieved radius `d(T -> S)` and weights computed at that radius.
pub fn solve_k_mcs(
    ds: &LabeledDataset,
    k: usize,
    norm: Norm,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<CoverSolution> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "delta must be positive, got {delta}"
        )));
    }
    cfg.validate()?;
    let classes = ds.present_classes();
    if k < classes.len() {
        return Err(Error::BudgetBelowClassCount {
            budget: k,
            classes: classes.len(),
        });
    }
    if k >= ds.len() {
        let mut sol = solve_eta_mcs(ds, 0.0, norm, cfg)?;
        sol.search = Some(RadiusSearch {
            lower: 0.0,
            upper: 0.0,
            iterations: 0,
        });
        return Ok(sol);
    }

    let radius = classes
        .iter()
        .map(|&c| diameter(ds.points(), ds.class_indices(c), norm))
        .fold(0.0, f64::max);
    let (mut lower, mut upper) = (0.0f64, radius);
    let mut iterations = 0;
    while upper - lower > delta {
        let mid = 0.5 * (lower + upper);
        if feasible_with_k(ds, mid, k, norm, cfg)? {
            upper = mid;
        } else {
            lower = mid;
        }
        iterations += 1;
    }

    let mut sol = solve_eta_mcs(ds, upper, norm, cfg)?;
    let achieved = sol.per_class.iter().map(|c| c.radius).fold(0.0, f64::max);
    sol.eta = achieved;
    sol.weights = compute_weights(ds, &sol, norm, WeightMode::Multiplicity)?;
    sol.search = Some(RadiusSearch {
        lower,
        upper,
        iterations,
    });
    Ok(sol)
}

/// [`solve_k_mcs`] run separately for every class with budget `k` each.
pub fn solve_k_mcs_per_class(
    ds: &LabeledDataset,
    k: usize,
    norm: Norm,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<CoverSolution> {
    if k == 0 {
        return Err(Error::BudgetBelowClassCount {
            budget: 0,
            classes: 1,
        });
    }
    let mut selected = Vec::new();
    let mut all_exact = true;
    let mut iterations = 0;
    let mut upper = 0.0f64;
    for class in ds.present_classes() {
        let idx = ds.class_indices(class);
        if k > idx.len() {
            return Err(Error::BudgetExceedsClass {
                class,
                budget: k,
                size: idx.len(),
            });
        }
        let sub = ds.subset(idx)?;
        let sol = solve_k_mcs(&sub, k, norm, delta, cfg)?;
        all_exact &= sol.solver == SolverKind::Exact;
        if let Some(s) = sol.search {
            iterations = iterations.max(s.iterations);
            upper = upper.max(s.upper);
        }
        selected.extend(sol.selected.iter().map(|&l| idx[l]));
    }
    let mut sol = CoverSolution::from_selection(
        ds,
        selected,
        norm,
        if all_exact {
            SolverKind::Exact
        } else {
            SolverKind::Greedy
        },
    )?;
    sol.weights = compute_weights(ds, &sol, norm, WeightMode::Multiplicity)?;
    sol.search = Some(RadiusSearch {
        lower: 0.0,
        upper,
        iterations,
    });
    Ok(sol)
}

/// Check that every point has a same-class center within `sol.eta`.
pub fn verify_cover(ds: &LabeledDataset, sol: &CoverSolution, norm: Norm) -> CoverReport {
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ds.num_classes()];
    for &s in &sol.selected {
        if s < ds.len() {
            by_class[ds.label(s)].push(s);
        }
    }
    let mut achieved = 0.0f64;
    let mut violations = Vec::new();
    for i in 0..ds.len() {
        let (_, d) = nearest_center(ds, i, &by_class[ds.label(i)], norm);
        achieved = achieved.max(d);
        if d.is_nan() || d > sol.eta {
            violations.push(i);
        }
    }
    CoverReport {
        valid: violations.is_empty() && sol.selected.iter().all(|&s| s < ds.len()),
        achieved_radius: achieved,
        violations,
    }
}

/// Weight `q` of every selected center at radius `sol.eta`.
pub fn compute_weights(
    ds: &LabeledDataset,
    sol: &CoverSolution,
    norm: Norm,
    mode: WeightMode,
) -> Result<Vec<u64>> {
    let report = verify_cover(ds, sol, norm);
    if !report.valid {
        return Err(Error::InvalidCover {
            violations: report.violations,
        });
    }
    match mode {
        WeightMode::Multiplicity => Ok(sol
            .selected
            .iter()
            .map(|&s| {
                let center = ds.points().point(s);
                ds.class_indices(ds.label(s))
                    .iter()
                    .filter(|&&i| norm.dist(ds.points().point(i), center) <= sol.eta)
                    .count() as u64
            })
            .collect()),
        WeightMode::Partition => {
            let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ds.num_classes()];
            for &s in &sol.selected {
                by_class[ds.label(s)].push(s);
            }
            let mut counts = vec![0u64; sol.selected.len()];
            for i in 0..ds.len() {
                let owner = match sol.selected.binary_search(&i) {
                    Ok(_) => i,
                    Err(_) => nearest_center(ds, i, &by_class[ds.label(i)], norm)
                        .0
                        .expect("valid cover has a center for every class"),
                };
                let slot = sol.selected.binary_search(&owner).expect("owner is selected");
                counts[slot] += 1;
            }
            Ok(counts)
        }
    }
}

/// Whether the closed `radius`-balls around centers of different classes are
/// pairwise disjoint. Callers pass `eps + eta`.
pub fn check_fattening_zip(ds: &LabeledDataset, sol: &CoverSolution, radius: f64, norm: Norm) -> bool {
    let sel = &sol.selected;
    for (a, &i) in sel.iter().enumerate() {
        for &j in &sel[a + 1..] {
            if ds.label(i) != ds.label(j)
                && norm.dist(ds.points().point(i), ds.points().point(j)) <= 2.0 * radius
            {
                return false;
            }
        }
    }
    true
}
