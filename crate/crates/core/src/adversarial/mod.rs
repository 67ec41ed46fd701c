//! Losses, attacks and training for linear classifiers and a small MLP.

pub mod attack;
pub mod loss;
pub mod model;
pub mod train;

pub use attack::{
    attack, eps2_from_epsinf, grid_attack, linear_worst_case_loss, pgd_attack, project, AttackConfig,
    AttackMode, ALPHA_CIFAR, ALPHA_MNIST, GRID_REFINEMENTS,
};
pub use loss::{
    accuracy, empirical_adv_loss, empirical_standard_loss, generalized_adv_loss, margin_loss, verify_bound,
    BoundReport, InnerMax, LossEstimate, BOUND_TOLERANCE,
};
pub use model::{sigmoid, softplus, Classifier, LinearModel, Mlp};
pub use train::{objective_gradient, objective_value, train, Objective, TrainConfig, TrainData, TrainReport};
