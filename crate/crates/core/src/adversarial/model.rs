use rand::Rng;
use rand_distr::StandardNormal;

use crate::metric::Norm;
use crate::rng;

/// `log(1 + e^z)` without overflow.
#[inline]
pub fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `+1` for class 1, `-1` otherwise.
#[inline]
pub(crate) fn signed_label(label: usize) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Logistic loss on one logit (binary) or cross-entropy on per-class scores,
/// together with its gradient with respect to the scores.
pub(crate) fn loss_and_score_grad(scores: &[f64], label: usize) -> (f64, Vec<f64>) {
    if scores.len() == 1 {
        let y = signed_label(label);
        let m = y * scores[0];
        (softplus(-m), vec![-y * sigmoid(-m)])
    } else {
        let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = scores.iter().map(|s| (s - top).exp()).sum();
        let lse = top + sum.ln();
        let mut grad: Vec<f64> = scores.iter().map(|s| (s - lse).exp()).collect();
        grad[label] -= 1.0;
        ((lse - scores[label]).max(0.0), grad)
    }
}

/// A differentiable classifier over `R^dim`.
///
/// Binary models emit a single logit `s` and predict class 1 iff `s > 0`;
/// multiclass models emit one score per class. A prediction counts as correct
/// only when the true class wins strictly, so ties are errors.
pub trait Classifier {
    fn dim(&self) -> usize;

    /// At least 2; binary models report 2.
    fn num_classes(&self) -> usize;

    fn scores(&self, x: &[f64]) -> Vec<f64>;

    /// Loss and its gradient with respect to the input.
    fn input_gradient(&self, x: &[f64], label: usize) -> (f64, Vec<f64>);

    fn num_params(&self) -> usize;

    fn params(&self) -> Vec<f64>;

    fn set_params(&mut self, params: &[f64]);

    /// Adds `scale * dloss/dparams` to `grad` and returns the loss.
    fn accumulate_param_gradient(&self, x: &[f64], label: usize, scale: f64, grad: &mut [f64]) -> f64;

    /// Set for linear models, whose worst-case perturbation has a closed form.
    fn as_linear(&self) -> Option<&LinearModel> {
        None
    }

    fn loss(&self, x: &[f64], label: usize) -> f64 {
        loss_and_score_grad(&self.scores(x), label).0
    }

    fn is_correct(&self, x: &[f64], label: usize) -> bool {
        let s = self.scores(x);
        if s.len() == 1 {
            signed_label(label) * s[0] > 0.0
        } else {
            s.iter().enumerate().all(|(c, &v)| c == label || s[label] > v)
        }
    }

    fn predict(&self, x: &[f64]) -> usize {
        let s = self.scores(x);
        if s.len() == 1 {
            usize::from(s[0] > 0.0)
        } else {
            let mut best = 0;
            for c in 1..s.len() {
                if s[c] > s[best] {
                    best = c;
                }
            }
            best
        }
    }
}

/// Affine scores `W x + b`. One row means a binary model with prediction
/// `sign(w . x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    dim: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl LinearModel {
    pub fn binary(weights: Vec<f64>, bias: f64) -> Self {
        LinearModel {
            dim: weights.len(),
            weights,
            bias: vec![bias],
        }
    }

    /// One weight row and one bias per class.
    pub fn multiclass(rows: Vec<Vec<f64>>, bias: Vec<f64>) -> Self {
        assert_eq!(rows.len(), bias.len(), "one bias per class");
        assert!(rows.len() >= 2, "multiclass models need at least two classes");
        let dim = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows share one dimension");
        LinearModel {
            dim,
            weights: rows.concat(),
            bias,
        }
    }

    /// All-zero model; binary when `classes == 2`.
    pub fn zeros(dim: usize, classes: usize) -> Self {
        let rows = if classes <= 2 { 1 } else { classes };
        LinearModel {
            dim,
            weights: vec![0.0; rows * dim],
            bias: vec![0.0; rows],
        }
    }

    /// Standard-normal weights and biases scaled by `scale`, from `seed`.
    pub fn random(dim: usize, classes: usize, scale: f64, seed: u64) -> Self {
        let mut model = LinearModel::zeros(dim, classes);
        let mut rng = rng::stream(seed);
        for w in model.weights.iter_mut().chain(model.bias.iter_mut()) {
            let z: f64 = rng.sample(StandardNormal);
            *w = scale * z;
        }
        model
    }

    pub fn is_binary(&self) -> bool {
        self.bias.len() == 1
    }

    pub fn rows(&self) -> usize {
        self.bias.len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.weights[r * self.dim..(r + 1) * self.dim]
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// Signed margin `y (w . x + b)` of a binary model.
    pub fn margin(&self, x: &[f64], label: usize) -> f64 {
        debug_assert!(self.is_binary());
        signed_label(label) * (dot(self.row(0), x) + self.bias[0])
    }

    /// Smallest margin over the closed `radius`-ball around `x`:
    /// `y (w . x + b) - radius * ||w||_q` with `q` dual to `norm`.
    pub fn worst_case_margin(&self, x: &[f64], label: usize, radius: f64, norm: Norm) -> f64 {
        self.margin(x, label) - radius * norm.dual().norm(self.row(0))
    }

    /// A perturbation of norm `radius` that attains [`Self::worst_case_margin`].
    pub fn worst_case_delta(&self, label: usize, radius: f64, norm: Norm) -> Vec<f64> {
        let y = signed_label(label);
        let dir = dual_norm_gradient(self.row(0), norm);
        dir.into_iter().map(|g| -y * radius * g).collect()
    }

    /// Whether every point of the closed `radius`-ball around `x` is
    /// classified correctly. For multiclass models each competing class is
    /// checked against its own worst case.
    pub fn robustly_correct(&self, x: &[f64], label: usize, radius: f64, norm: Norm) -> bool {
        if self.is_binary() {
            return self.worst_case_margin(x, label, radius, norm) > 0.0;
        }
        let dual = norm.dual();
        let wy = self.row(label);
        (0..self.rows()).filter(|&c| c != label).all(|c| {
            let wc = self.row(c);
            let diff: Vec<f64> = wy.iter().zip(wc).map(|(a, b)| a - b).collect();
            dot(&diff, x) + self.bias[label] - self.bias[c] - radius * dual.norm(&diff) > 0.0
        })
    }
}

/// A (sub)gradient `g` of `w -> ||w||_q` for `q` dual to `norm`, so that
/// `g . w = ||w||_q` and `||g||_p <= 1`.
pub(crate) fn dual_norm_gradient(w: &[f64], norm: Norm) -> Vec<f64> {
    match norm.dual() {
        Norm::L1 => w.iter().map(|&v| sign(v)).collect(),
        Norm::L2 => {
            let n = Norm::L2.norm(w);
            if n == 0.0 {
                vec![0.0; w.len()]
            } else {
                w.iter().map(|v| v / n).collect()
            }
        }
        Norm::LInf => {
            let mut g = vec![0.0; w.len()];
            let mut best = 0;
            for (i, v) in w.iter().enumerate() {
                if v.abs() > w[best].abs() {
                    best = i;
                }
            }
            if let Some(v) = w.get(best) {
                g[best] = sign(*v);
            }
            g
        }
    }
}

#[inline]
pub(crate) fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Classifier for LinearModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn num_classes(&self) -> usize {
        self.rows().max(2)
    }

    fn scores(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows())
            .map(|r| dot(self.row(r), x) + self.bias[r])
            .collect()
    }

    fn input_gradient(&self, x: &[f64], label: usize) -> (f64, Vec<f64>) {
        let (loss, ds) = loss_and_score_grad(&self.scores(x), label);
        let mut g = vec![0.0; self.dim];
        for (r, d) in ds.iter().enumerate() {
            for (gi, w) in g.iter_mut().zip(self.row(r)) {
                *gi += d * w;
            }
        }
        (loss, g)
    }

    fn num_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    fn params(&self) -> Vec<f64> {
        self.weights.iter().chain(&self.bias).copied().collect()
    }

    fn set_params(&mut self, params: &[f64]) {
        let (w, b) = params.split_at(self.weights.len());
        self.weights.copy_from_slice(w);
        self.bias.copy_from_slice(b);
    }

    fn accumulate_param_gradient(&self, x: &[f64], label: usize, scale: f64, grad: &mut [f64]) -> f64 {
        let (loss, ds) = loss_and_score_grad(&self.scores(x), label);
        let nw = self.weights.len();
        for (r, d) in ds.iter().enumerate() {
            let s = scale * d;
            for (gi, xi) in grad[r * self.dim..(r + 1) * self.dim].iter_mut().zip(x) {
                *gi += s * xi;
            }
            grad[nw + r] += s;
        }
        loss
    }

    fn as_linear(&self) -> Option<&LinearModel> {
        Some(self)
    }
}

/// One hidden `tanh` layer followed by an affine output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    dim: usize,
    hidden: usize,
    outputs: usize,
    /// `w1` (hidden x dim), `b1`, `w2` (outputs x hidden), `b2`, flattened.
    params: Vec<f64>,
}

impl Mlp {
    /// Gaussian initialisation with variance `1 / fan_in`; binary when
    /// `classes == 2`.
    pub fn new(dim: usize, hidden: usize, classes: usize, seed: u64) -> Self {
        let outputs = if classes <= 2 { 1 } else { classes };
        let mut mlp = Mlp {
            dim,
            hidden,
            outputs,
            params: vec![0.0; hidden * dim + hidden + outputs * hidden + outputs],
        };
        let mut rng = rng::stream(seed);
        let (s1, s2) = (1.0 / (dim as f64).sqrt(), 1.0 / (hidden as f64).sqrt());
        let (o_b1, o_w2, o_b2) = mlp.offsets();
        for (i, p) in mlp.params.iter_mut().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            *p = if i < o_b1 {
                s1 * z
            } else if i < o_w2 {
                0.1 * z
            } else if i < o_b2 {
                s2 * z
            } else {
                0.0
            };
        }
        mlp
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    fn offsets(&self) -> (usize, usize, usize) {
        let o_b1 = self.hidden * self.dim;
        let o_w2 = o_b1 + self.hidden;
        let o_b2 = o_w2 + self.outputs * self.hidden;
        (o_b1, o_w2, o_b2)
    }

    fn hidden_activations(&self, x: &[f64]) -> Vec<f64> {
        let (o_b1, _, _) = self.offsets();
        (0..self.hidden)
            .map(|h| (dot(&self.params[h * self.dim..(h + 1) * self.dim], x) + self.params[o_b1 + h]).tanh())
            .collect()
    }

    fn output(&self, act: &[f64]) -> Vec<f64> {
        let (_, o_w2, o_b2) = self.offsets();
        (0..self.outputs)
            .map(|o| {
                dot(
                    &self.params[o_w2 + o * self.hidden..o_w2 + (o + 1) * self.hidden],
                    act,
                ) + self.params[o_b2 + o]
            })
            .collect()
    }

    /// Gradient of the loss with respect to the hidden pre-activations.
    fn backprop_hidden(&self, act: &[f64], dscores: &[f64]) -> Vec<f64> {
        let (_, o_w2, _) = self.offsets();
        (0..self.hidden)
            .map(|h| {
                let up: f64 = (0..self.outputs)
                    .map(|o| dscores[o] * self.params[o_w2 + o * self.hidden + h])
                    .sum();
                up * (1.0 - act[h] * act[h])
            })
            .collect()
    }
}

impl Classifier for Mlp {
    fn dim(&self) -> usize {
        self.dim
    }

    fn num_classes(&self) -> usize {
        self.outputs.max(2)
    }

    fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.output(&self.hidden_activations(x))
    }

    fn input_gradient(&self, x: &[f64], label: usize) -> (f64, Vec<f64>) {
        let act = self.hidden_activations(x);
        let (loss, ds) = loss_and_score_grad(&self.output(&act), label);
        let dpre = self.backprop_hidden(&act, &ds);
        let mut g = vec![0.0; self.dim];
        for (h, d) in dpre.iter().enumerate() {
            for (gi, w) in g.iter_mut().zip(&self.params[h * self.dim..(h + 1) * self.dim]) {
                *gi += d * w;
            }
        }
        (loss, g)
    }

    fn num_params(&self) -> usize {
        self.params.len()
    }

    fn params(&self) -> Vec<f64> {
        self.params.clone()
    }

    fn set_params(&mut self, params: &[f64]) {
        self.params.copy_from_slice(params);
    }

    fn accumulate_param_gradient(&self, x: &[f64], label: usize, scale: f64, grad: &mut [f64]) -> f64 {
        let (o_b1, o_w2, o_b2) = self.offsets();
        let act = self.hidden_activations(x);
        let (loss, ds) = loss_and_score_grad(&self.output(&act), label);
        for (o, d) in ds.iter().enumerate() {
            let s = scale * d;
            for (h, a) in act.iter().enumerate() {
                grad[o_w2 + o * self.hidden + h] += s * a;
            }
            grad[o_b2 + o] += s;
        }
        let dpre = self.backprop_hidden(&act, &ds);
        for (h, d) in dpre.iter().enumerate() {
            let s = scale * d;
            for (j, xj) in x.iter().enumerate() {
                grad[h * self.dim + j] += s * xj;
            }
            grad[o_b1 + h] += s;
        }
        loss
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_loss_values() {
        let model = LinearModel::binary(vec![1.0], 0.0);
        assert_eq!(model.loss(&[0.0], 1), std::f64::consts::LN_2);
        let expected = (1.0 + (-2.0f64).exp()).ln();
        assert!((model.loss(&[2.0], 1) - expected).abs() < 1e-15);
        assert!(model.loss(&[800.0], 1) < 1e-300);
        assert!((model.loss(&[-800.0], 1) - 800.0).abs() < 1e-9);
    }

    #[test]
    fn cross_entropy_is_nonnegative_and_stable() {
        let model = LinearModel::multiclass(vec![vec![1000.0], vec![0.0], vec![-1000.0]], vec![0.0; 3]);
        assert!(model.loss(&[1.0], 0) >= 0.0);
        assert!((model.loss(&[1.0], 2) - 2000.0).abs() < 1e-9);
    }

    #[test]
    fn ties_are_misclassified() {
        let model = LinearModel::binary(vec![1.0, 0.0], 0.0);
        assert!(!model.is_correct(&[0.0, 3.0], 1));
        assert!(!model.is_correct(&[0.0, 3.0], 0));
        assert!(model.is_correct(&[0.5, 3.0], 1));
        assert_eq!(model.predict(&[0.5, 3.0]), 1);
    }

    #[test]
    fn worst_case_margin_uses_dual_norm() {
        let model = LinearModel::binary(vec![3.0, 4.0], 0.0);
        let x = [1.0, 1.0];
        assert_eq!(model.worst_case_margin(&x, 1, 1.0, Norm::L2), 7.0 - 5.0);
        assert_eq!(model.worst_case_margin(&x, 1, 1.0, Norm::LInf), 7.0 - 7.0);
        assert_eq!(model.worst_case_margin(&x, 1, 1.0, Norm::L1), 7.0 - 4.0);
        for norm in [Norm::L1, Norm::L2, Norm::LInf] {
            let delta = model.worst_case_delta(1, 0.5, norm);
            assert!(norm.norm(&delta) <= 0.5 + 1e-15);
            let moved: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + b).collect();
            let m = model.margin(&moved, 1);
            assert!((m - model.worst_case_margin(&x, 1, 0.5, norm)).abs() < 1e-12);
        }
    }

    #[test]
    fn multiclass_robust_correctness() {
        // Scores x, 0, -x on one input coordinate.
        let model = LinearModel::multiclass(vec![vec![1.0], vec![0.0], vec![-1.0]], vec![0.0; 3]);
        assert!(model.robustly_correct(&[2.0], 0, 1.9, Norm::L2));
        assert!(!model.robustly_correct(&[2.0], 0, 2.0, Norm::L2));
        assert!(model.robustly_correct(&[2.0], 0, 0.0, Norm::L2) == model.is_correct(&[2.0], 0));
    }

    #[test]
    fn params_round_trip() {
        let mut mlp = Mlp::new(3, 4, 3, 7);
        let p = mlp.params();
        assert_eq!(p.len(), mlp.num_params());
        let shifted: Vec<f64> = p.iter().map(|v| v + 1.0).collect();
        mlp.set_params(&shifted);
        assert_eq!(mlp.params(), shifted);
        let lin = LinearModel::random(3, 2, 1.0, 1);
        assert_eq!(lin.params().len(), 4);
    }
}
