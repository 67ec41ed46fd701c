//! Inner maximisation over a norm ball: the closed form for binary linear
//! models, projected gradient ascent for everything else, and an exhaustive
//! lattice search for inputs of dimension three or less.

use serde::{Deserialize, Serialize};

use super::model::{sign, softplus, Classifier, LinearModel};
use crate::error::{Error, Result};
use crate::metric::Norm;

/// PGD step size for inputs scaled to `[0, 1]` at MNIST-like radii.
pub const ALPHA_MNIST: f64 = 1e-1;
/// PGD step size for CIFAR-like radii.
pub const ALPHA_CIFAR: f64 = 1e-2;

/// `l_2` radius whose ball has roughly the volume of the `l_inf` ball of
/// radius `eps_inf` in dimension `n`: `sqrt(2n / (pi e)) * eps_inf`.
pub fn eps2_from_epsinf(eps_inf: f64, n: usize) -> f64 {
    (2.0 * n as f64 / (std::f64::consts::PI * std::f64::consts::E)).sqrt() * eps_inf
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackMode {
    Pgd,
    ExactLinear,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub eps: f64,
    pub alpha: f64,
    pub steps: usize,
    pub norm: Norm,
    pub mode: AttackMode,
}

impl AttackConfig {
    /// PGD with 10 steps of size `eps / 4`.
    pub fn pgd(eps: f64, norm: Norm) -> Self {
        AttackConfig {
            eps,
            alpha: if eps > 0.0 { eps / 4.0 } else { 1e-3 },
            steps: 10,
            norm,
            mode: AttackMode::Pgd,
        }
    }

    pub fn exact(eps: f64, norm: Norm) -> Self {
        AttackConfig {
            mode: AttackMode::ExactLinear,
            ..AttackConfig::pgd(eps, norm)
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "eps must be non-negative, got {}",
                self.eps
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) || self.steps == 0 {
            return Err(Error::InvalidConfig(
                "alpha must be positive and steps at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Closed-form `max_{||delta|| <= eps} l(f(x + delta), y)` for a binary
/// linear model. The logistic loss falls with the margin, so the maximum is
/// the loss at the worst-case margin `y (w . x + b) - eps ||w||_q`.
pub fn linear_worst_case_loss(
    model: &LinearModel,
    x: &[f64],
    label: usize,
    eps: f64,
    norm: Norm,
) -> Result<f64> {
    if !model.is_binary() {
        return Err(Error::UnsupportedModel(
            "closed-form inner maximum needs a binary linear model",
        ));
    }
    Ok(softplus(-model.worst_case_margin(x, label, eps, norm)))
}

/// Projected gradient ascent on the loss, started at `x` itself.
///
/// `l_inf` takes signed-gradient steps and clamps per coordinate; `l_2`
/// steps along the normalised gradient and rescales onto the ball; `l_1`
/// moves the coordinate with the largest gradient and projects onto the
/// `l_1` ball. The best iterate seen (the start included) is returned, so the
/// result never has a lower loss than `x`.
pub fn pgd_attack<M: Classifier + ?Sized>(
    model: &M,
    x: &[f64],
    label: usize,
    cfg: &AttackConfig,
) -> Vec<f64> {
    if cfg.eps == 0.0 {
        return x.to_vec();
    }
    let mut best = (model.loss(x, label), x.to_vec());
    let mut cur = x.to_vec();
    for _ in 0..cfg.steps {
        let (_, g) = model.input_gradient(&cur, label);
        match cfg.norm {
            Norm::LInf => {
                for (c, gi) in cur.iter_mut().zip(&g) {
                    *c += cfg.alpha * sign(*gi);
                }
            }
            Norm::L2 => {
                let n = Norm::L2.norm(&g);
                if n == 0.0 {
                    break;
                }
                for (c, gi) in cur.iter_mut().zip(&g) {
                    *c += cfg.alpha * gi / n;
                }
            }
            Norm::L1 => {
                let mut k = 0;
                for (i, gi) in g.iter().enumerate() {
                    if gi.abs() > g[k].abs() {
                        k = i;
                    }
                }
                if g[k] == 0.0 {
                    break;
                }
                cur[k] += cfg.alpha * sign(g[k]);
            }
        }
        project(&mut cur, x, cfg.eps, cfg.norm);
        let loss = model.loss(&cur, label);
        if loss > best.0 {
            best = (loss, cur.clone());
        }
    }
    best.1
}

/// Project `point` onto the closed `eps`-ball around `center`.
pub fn project(point: &mut [f64], center: &[f64], eps: f64, norm: Norm) {
    match norm {
        Norm::LInf => {
            for (p, c) in point.iter_mut().zip(center) {
                *p = p.clamp(c - eps, c + eps);
            }
        }
        Norm::L2 => {
            let d: Vec<f64> = point.iter().zip(center).map(|(p, c)| p - c).collect();
            let n = Norm::L2.norm(&d);
            if n > eps {
                let s = eps / n;
                for ((p, c), di) in point.iter_mut().zip(center).zip(&d) {
                    *p = c + di * s;
                }
            }
        }
        Norm::L1 => {
            let d: Vec<f64> = point.iter().zip(center).map(|(p, c)| p - c).collect();
            if Norm::L1.norm(&d) <= eps {
                return;
            }
            // Soft-threshold at the level that brings the l1 norm down to eps.
            let mut mags: Vec<f64> = d.iter().map(|v| v.abs()).collect();
            mags.sort_unstable_by(|a, b| b.total_cmp(a));
            let mut acc = 0.0;
            let mut theta = 0.0;
            for (i, m) in mags.iter().enumerate() {
                acc += m;
                let t = (acc - eps) / (i + 1) as f64;
                if i + 1 == mags.len() || mags[i + 1] <= t {
                    theta = t;
                    break;
                }
            }
            for ((p, c), di) in point.iter_mut().zip(center).zip(&d) {
                *p = c + sign(*di) * (di.abs() - theta).max(0.0);
            }
        }
    }
}

/// Grid search for the worst perturbation, for `dim <= 3`.
///
/// A lattice with `per_axis` nodes per coordinate covers `[-eps, eps]^dim`;
/// nodes outside the `norm`-ball are projected onto it. The search then
/// zooms in around the best candidate [`GRID_REFINEMENTS`] times, each time
/// spanning two old lattice steps on either side, so the result is a
/// near-exact maximum for smooth losses. The unperturbed input is always a
/// candidate.
pub fn grid_attack<M: Classifier + ?Sized>(
    model: &M,
    x: &[f64],
    label: usize,
    eps: f64,
    norm: Norm,
    per_axis: usize,
) -> Result<Vec<f64>> {
    let dim = x.len();
    if dim > 3 {
        return Err(Error::InvalidConfig(
            "grid attack supports at most 3 input dimensions".into(),
        ));
    }
    let per_axis = per_axis.max(3);
    let mut best = (model.loss(x, label), vec![0.0; dim]);
    let mut center = vec![0.0; dim];
    let mut half = eps;
    for _ in 0..=GRID_REFINEMENTS {
        let step = 2.0 * half / (per_axis - 1) as f64;
        lattice(model, x, label, eps, norm, &center, half, per_axis, &mut best);
        center.clone_from(&best.1);
        half = 2.0 * step;
        if half == 0.0 {
            break;
        }
    }
    Ok(x.iter().zip(&best.1).map(|(a, d)| a + d).collect())
}

/// Zoom rounds performed by [`grid_attack`] after the initial lattice.
pub const GRID_REFINEMENTS: usize = 12;

#[allow(clippy::too_many_arguments)]
fn lattice<M: Classifier + ?Sized>(
    model: &M,
    x: &[f64],
    label: usize,
    eps: f64,
    norm: Norm,
    center: &[f64],
    half: f64,
    per_axis: usize,
    best: &mut (f64, Vec<f64>),
) {
    let dim = x.len();
    let step = 2.0 * half / (per_axis - 1) as f64;
    let mut idx = vec![0usize; dim];
    let mut delta = vec![0.0; dim];
    let mut cand = vec![0.0; dim];
    let zero = vec![0.0; dim];
    'outer: loop {
        for ((d, &i), c) in delta.iter_mut().zip(&idx).zip(center) {
            *d = c - half + step * i as f64;
        }
        project(&mut delta, &zero, eps, norm);
        for ((c, xi), d) in cand.iter_mut().zip(x).zip(&delta) {
            *c = xi + d;
        }
        let loss = model.loss(&cand, label);
        if loss > best.0 {
            *best = (loss, delta.clone());
        }
        for i in idx.iter_mut() {
            *i += 1;
            if *i < per_axis {
                continue 'outer;
            }
            *i = 0;
        }
        break;
    }
}

/// The attacked input for `cfg.mode`.
pub fn attack<M: Classifier + ?Sized>(
    model: &M,
    x: &[f64],
    label: usize,
    cfg: &AttackConfig,
) -> Result<Vec<f64>> {
    match cfg.mode {
        AttackMode::Pgd => Ok(pgd_attack(model, x, label, cfg)),
        AttackMode::Grid => grid_attack(model, x, label, cfg.eps, cfg.norm, 201),
        AttackMode::ExactLinear => {
            let lin = model
                .as_linear()
                .filter(|m| m.is_binary())
                .ok_or(Error::UnsupportedModel(
                    "exact attack needs a binary linear model",
                ))?;
            let delta = lin.worst_case_delta(label, cfg.eps, cfg.norm);
            Ok(x.iter().zip(delta).map(|(a, d)| a + d).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversarial::Mlp;

    #[test]
    fn volume_matching_radius() {
        // 2n = pi e at n ~ 4.27, so n = 4 shrinks the radius and n = 5 grows it.
        assert!(eps2_from_epsinf(1.0, 4) < 1.0 && eps2_from_epsinf(1.0, 5) > 1.0);
        assert!((eps2_from_epsinf(0.1, 784) - 1.36).abs() <= 0.005);
        assert!((eps2_from_epsinf(8.0 / 255.0, 3072) - 0.84).abs() <= 0.005);
    }

    #[test]
    fn closed_form_examples() {
        let model = LinearModel::binary(vec![1.0], 0.0);
        assert_eq!(
            linear_worst_case_loss(&model, &[2.0], 1, 0.0, Norm::LInf).unwrap(),
            model.loss(&[2.0], 1)
        );
        let got = linear_worst_case_loss(&model, &[2.0], 1, 0.5, Norm::LInf).unwrap();
        assert!((got - (1.0 + (-1.5f64).exp()).ln()).abs() < 1e-15);
        // Grid over delta in [-0.5, 0.5] at 1e-4 resolution.
        let grid = (0..=10_000)
            .map(|i| model.loss(&[2.0 - 0.5 + i as f64 * 1e-4], 1))
            .fold(0.0, f64::max);
        assert!((grid - got).abs() < 1e-12);

        let multi = LinearModel::zeros(2, 3);
        assert!(linear_worst_case_loss(&multi, &[0.0, 0.0], 0, 1.0, Norm::L2).is_err());
    }

    #[test]
    fn zero_radius_returns_input() {
        let model = Mlp::new(2, 5, 2, 3);
        let x = [0.3, -0.2];
        assert_eq!(
            pgd_attack(&model, &x, 1, &AttackConfig::pgd(0.0, Norm::L2)),
            x.to_vec()
        );
    }

    #[test]
    fn pgd_reaches_linear_worst_case() {
        let model = LinearModel::binary(vec![0.5, -2.0, 0.0], 0.3);
        let x = [0.1, 0.2, 0.3];
        let cfg = AttackConfig::pgd(0.25, Norm::LInf).with_alpha(0.25).with_steps(1);
        let adv = pgd_attack(&model, &x, 1, &cfg);
        let exact = linear_worst_case_loss(&model, &x, 1, 0.25, Norm::LInf).unwrap();
        assert!((model.loss(&adv, 1) - exact).abs() < 1e-12);
    }

    #[test]
    fn projections_land_in_the_ball() {
        let center = [1.0, -1.0, 0.5];
        for norm in [Norm::L1, Norm::L2, Norm::LInf] {
            let mut p = [4.0, 2.0, -3.0];
            project(&mut p, &center, 0.7, norm);
            let d: Vec<f64> = p.iter().zip(&center).map(|(a, b)| a - b).collect();
            assert!(norm.norm(&d) <= 0.7 + 1e-12, "{norm}: {}", norm.norm(&d));
            let mut inside = [1.1, -1.0, 0.5];
            project(&mut inside, &center, 0.7, norm);
            assert_eq!(inside, [1.1, -1.0, 0.5]);
        }
    }

    #[test]
    fn l1_projection_is_soft_threshold() {
        let mut p = [3.0, 1.0];
        project(&mut p, &[0.0, 0.0], 2.0, Norm::L1);
        assert_eq!(p, [2.0, 0.0]);
        let mut p = [3.0, 2.0];
        project(&mut p, &[0.0, 0.0], 3.0, Norm::L1);
        assert_eq!(p, [2.0, 1.0]);
    }

    #[test]
    fn grid_attack_dimension_limit() {
        let model = LinearModel::binary(vec![1.0; 4], 0.0);
        assert!(grid_attack(&model, &[0.0; 4], 1, 0.1, Norm::LInf, 5).is_err());
        let model = LinearModel::binary(vec![1.0, 1.0], 0.0);
        let adv = grid_attack(&model, &[0.0, 0.0], 1, 0.1, Norm::LInf, 5).unwrap();
        assert_eq!(adv, vec![-0.1, -0.1]);
    }
}
