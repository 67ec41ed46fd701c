//! Minimal finite coverings and minimal coresets of labeled point sets, with
//! the weighted adversarial losses that let a model trained on the coreset
//! certify its adversarial loss on the full data.

pub mod adversarial;
pub mod baselines;
pub mod covering;
pub mod dataset;
pub mod error;
pub mod io;
pub mod metric;
pub mod rng;
pub mod synthetic;

pub use adversarial::{
    accuracy, empirical_adv_loss, empirical_standard_loss, generalized_adv_loss, train, verify_bound,
    AttackConfig, AttackMode, BoundReport, Classifier, InnerMax, LinearModel, Mlp, Objective, TrainConfig,
    TrainData,
};
pub use baselines::{
    compare_methods, compress, kcenter_greedy, random_coreset, BaselineSpec, BudgetMode, CompareConfig,
    ComparisonReport, ComparisonRow, Method, Stat,
};
pub use covering::{
    build_adjacency, check_fattening_zip, compute_weights, exact_min_cover, feasible_with_k, greedy_cover,
    solve_eta_mcs, solve_k_mcs, solve_k_mcs_per_class, verify_cover, AdjacencyMatrix, ClassCover,
    CoverReport, CoverSolution, SolverConfig, SolverKind, SolverMode, WeightMode,
};
pub use dataset::LabeledDataset;
pub use error::{Error, Result};
pub use metric::{
    directed_distance, hausdorff_distance, is_separated, lp_distance, min_interclass_distance,
    relaxed_hausdorff, Norm, PointSet,
};
