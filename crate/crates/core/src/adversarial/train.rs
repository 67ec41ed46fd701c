//! Full-batch gradient descent on the standard, adversarial and generalized
//! adversarial objectives.

use serde::{Deserialize, Serialize};

use super::attack::{attack, AttackConfig};
use super::model::{Classifier, LinearModel};
use crate::covering::CoverSolution;
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Standard,
    Adversarial,
    GeneralizedAdversarial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub objective: Objective,
    /// Inner maximisation for the adversarial objectives.
    pub attack: Option<AttackConfig>,
    /// The `|T|` normalizer of the generalized objective.
    pub total_count: Option<usize>,
}

impl TrainConfig {
    pub fn standard(learning_rate: f64, epochs: usize, seed: u64) -> Self {
        TrainConfig {
            learning_rate,
            epochs,
            seed,
            objective: Objective::Standard,
            attack: None,
            total_count: None,
        }
    }

    pub fn adversarial(learning_rate: f64, epochs: usize, seed: u64, attack: AttackConfig) -> Self {
        TrainConfig {
            objective: Objective::Adversarial,
            attack: Some(attack),
            ..TrainConfig::standard(learning_rate, epochs, seed)
        }
    }

    /// `attack.eps` is the data-space radius; the coreset's own `eta` is added
    /// during training.
    pub fn generalized(
        learning_rate: f64,
        epochs: usize,
        seed: u64,
        attack: AttackConfig,
        total_count: usize,
    ) -> Self {
        TrainConfig {
            objective: Objective::GeneralizedAdversarial,
            attack: Some(attack),
            total_count: Some(total_count),
            ..TrainConfig::standard(learning_rate, epochs, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.objective != Objective::Standard {
            self.attack
                .ok_or_else(|| Error::InvalidConfig("adversarial objectives need an attack".into()))?
                .validate()?;
        }
        if self.objective == Objective::GeneralizedAdversarial && !self.total_count.is_some_and(|n| n > 0) {
            return Err(Error::InvalidConfig(
                "generalized objective needs a positive total_count".into(),
            ));
        }
        Ok(())
    }

    /// A small random linear model seeded from `self.seed`.
    pub fn init_linear(&self, dim: usize, classes: usize) -> LinearModel {
        LinearModel::random(dim, classes, 0.01, self.seed)
    }
}

/// What the objective sums over.
#[derive(Debug, Clone, Copy)]
pub enum TrainData<'a> {
    Full(&'a LabeledDataset),
    /// The coreset in `sol.selected` order together with its solution.
    Coreset {
        coreset: &'a LabeledDataset,
        sol: &'a CoverSolution,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Objective value before each gradient step.
    pub curve: Vec<f64>,
    /// Objective value of the returned model.
    pub final_loss: f64,
}

struct Objectives<'a> {
    ds: &'a LabeledDataset,
    weights: Option<Vec<f64>>,
    normalizer: f64,
    attack: Option<AttackConfig>,
}

impl<'a> Objectives<'a> {
    fn new(data: TrainData<'a>, cfg: &TrainConfig) -> Result<Self> {
        let (ds, weights, normalizer, attack) = match (cfg.objective, data) {
            (Objective::Standard, TrainData::Full(ds)) => (ds, None, ds.len() as f64, None),
            (Objective::Adversarial, TrainData::Full(ds)) => (ds, None, ds.len() as f64, cfg.attack),
            (Objective::GeneralizedAdversarial, TrainData::Coreset { coreset, sol }) => {
                if sol.weights.is_empty() {
                    return Err(Error::MissingWeights);
                }
                if sol.weights.len() != coreset.len() {
                    return Err(Error::InvalidConfig("weights do not match the coreset".into()));
                }
                let total = cfg.total_count.unwrap_or(0);
                let mut attack = cfg.attack.expect("validated");
                attack.eps += sol.eta;
                (coreset, Some(sol.weights_f64()), total as f64, Some(attack))
            }
            (Objective::GeneralizedAdversarial, TrainData::Full(_)) => {
                return Err(Error::InvalidConfig(
                    "generalized objective trains on a coreset".into(),
                ))
            }
            (_, TrainData::Coreset { .. }) => {
                return Err(Error::InvalidConfig(
                    "coreset data needs the generalized objective".into(),
                ))
            }
        };
        // A zero radius is the standard objective; skipping the attack keeps
        // the two bitwise identical.
        let attack = attack.filter(|a| a.eps > 0.0);
        Ok(Objectives {
            ds,
            weights,
            normalizer,
            attack,
        })
    }

    /// Objective value, accumulating its gradient into `grad` when given.
    /// The adversarial gradient is taken at the attacked input.
    fn eval<M: Classifier + ?Sized>(&self, model: &M, mut grad: Option<&mut [f64]>) -> Result<f64> {
        let mut total = 0.0;
        for (i, x) in self.ds.points().iter().enumerate() {
            let y = self.ds.label(i);
            let scale = self.weights.as_ref().map_or(1.0, |w| w[i]) / self.normalizer;
            let input = match &self.attack {
                Some(cfg) => attack(model, x, y, cfg)?,
                None => x.to_vec(),
            };
            let loss = match grad.as_deref_mut() {
                Some(g) => model.accumulate_param_gradient(&input, y, scale, g),
                None => model.loss(&input, y),
            };
            total += scale * loss;
        }
        Ok(total)
    }
}

/// Objective value of `model` on `data` under `cfg`.
pub fn objective_value<M: Classifier + ?Sized>(
    model: &M,
    data: TrainData<'_>,
    cfg: &TrainConfig,
) -> Result<f64> {
    cfg.validate()?;
    Objectives::new(data, cfg)?.eval(model, None)
}

/// Objective value and its gradient with respect to `model.params()`.
pub fn objective_gradient<M: Classifier + ?Sized>(
    model: &M,
    data: TrainData<'_>,
    cfg: &TrainConfig,
) -> Result<(f64, Vec<f64>)> {
    cfg.validate()?;
    let obj = Objectives::new(data, cfg)?;
    let mut grad = vec![0.0; model.num_params()];
    let value = obj.eval(model, Some(&mut grad))?;
    Ok((value, grad))
}

/// `cfg.epochs` full-batch gradient steps from `model`.
pub fn train<M: Classifier>(
    mut model: M,
    data: TrainData<'_>,
    cfg: &TrainConfig,
) -> Result<(M, TrainReport)> {
    cfg.validate()?;
    let obj = Objectives::new(data, cfg)?;
    if model.dim() != obj.ds.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: obj.ds.dim(),
        });
    }
    let mut curve = Vec::with_capacity(cfg.epochs);
    let mut grad = vec![0.0; model.num_params()];
    let mut params = model.params();
    for epoch in 0..cfg.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let value = obj.eval(&model, Some(&mut grad))?;
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Diverged { epoch });
        }
        curve.push(value);
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= cfg.learning_rate * g;
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Diverged { epoch });
        }
        model.set_params(&params);
    }
    let final_loss = obj.eval(&model, None)?;
    if !final_loss.is_finite() {
        return Err(Error::Diverged { epoch: cfg.epochs });
    }
    Ok((model, TrainReport { curve, final_loss }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversarial::Mlp;
    use crate::covering::{solve_eta_mcs, SolverConfig};
    use crate::metric::{Norm, PointSet};

    fn separable() -> LabeledDataset {
        let pts = vec![
            -2.0, -1.0, -2.5, 0.3, -1.7, 1.1, -3.0, -0.4, 2.1, 0.2, 2.6, -1.2, 1.8, 0.9, 3.2, 0.1,
        ];
        LabeledDataset::new(PointSet::from_flat(2, pts).unwrap(), vec![0, 0, 0, 0, 1, 1, 1, 1]).unwrap()
    }

    #[test]
    fn standard_training_decreases_loss() {
        let ds = separable();
        let cfg = TrainConfig::standard(0.5, 200, 3);
        let (_, report) = train(cfg.init_linear(2, 2), TrainData::Full(&ds), &cfg).unwrap();
        let below = report.curve.iter().position(|&v| v < 0.1).expect("reaches 0.1");
        assert!(report.curve[..=below].windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn zero_radius_adversarial_matches_standard() {
        let ds = separable();
        let std_cfg = TrainConfig::standard(0.3, 30, 9);
        let adv_cfg = TrainConfig::adversarial(0.3, 30, 9, AttackConfig::exact(0.0, Norm::L2));
        let (a, _) = train(std_cfg.init_linear(2, 2), TrainData::Full(&ds), &std_cfg).unwrap();
        let (b, _) = train(adv_cfg.init_linear(2, 2), TrainData::Full(&ds), &adv_cfg).unwrap();
        assert_eq!(a.params(), b.params());
    }

    #[test]
    fn generalized_with_trivial_cover_matches_adversarial() {
        let ds = separable();
        let sol = solve_eta_mcs(&ds, 0.0, Norm::LInf, &SolverConfig::exact()).unwrap();
        let core = sol.coreset(&ds).unwrap();
        let atk = AttackConfig::exact(0.2, Norm::LInf);
        let adv = TrainConfig::adversarial(0.3, 25, 1, atk);
        let gen = TrainConfig::generalized(0.3, 25, 1, atk, ds.len());
        let (a, _) = train(adv.init_linear(2, 2), TrainData::Full(&ds), &adv).unwrap();
        let (b, _) = train(
            gen.init_linear(2, 2),
            TrainData::Coreset {
                coreset: &core,
                sol: &sol,
            },
            &gen,
        )
        .unwrap();
        assert_eq!(a.params(), b.params());
    }

    #[test]
    fn divergence_names_the_epoch() {
        let ds = separable();
        let cfg = TrainConfig::standard(1.0, 5, 0);
        let huge = LinearModel::binary(vec![f64::MAX, f64::MAX], 0.0);
        let err = train(huge, TrainData::Full(&ds), &cfg).unwrap_err();
        assert!(matches!(err, Error::Diverged { epoch: 0 }));
    }

    #[test]
    fn training_is_deterministic() {
        let ds = separable();
        let cfg = TrainConfig::adversarial(0.2, 10, 4, AttackConfig::pgd(0.1, Norm::LInf));
        let run = || train(Mlp::new(2, 4, 2, cfg.seed), TrainData::Full(&ds), &cfg).unwrap();
        let (a, ra) = run();
        let (b, rb) = run();
        assert_eq!(a.params(), b.params());
        assert_eq!(ra, rb);
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::standard(0.0, 1, 0).validate().is_err());
        assert!(TrainConfig::standard(0.1, 0, 0).validate().is_err());
        let mut cfg = TrainConfig::standard(0.1, 1, 0);
        cfg.objective = Objective::Adversarial;
        assert!(cfg.validate().is_err());
    }
}
