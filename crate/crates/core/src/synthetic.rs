//! Seeded dataset generators.
//!
//! All generators draw from [`crate::rng::stream`]; see that module for the
//! exact bit-level procedure.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::adversarial::LinearModel;
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::metric::{Norm, PointSet};
use crate::rng;

/// Binary task in `R^(n+1)` where the first coordinate agrees with the label
/// with probability `p` and the remaining `n` coordinates are uniform on
/// `[(y-1)/2, (y+1)/2]`, so they separate the classes perfectly but with no
/// margin against an `l_inf` adversary of radius 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffDistSpec {
    pub p: f64,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
}

impl TradeoffDistSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.5..=1.0).contains(&self.p) {
            return Err(Error::InvalidConfig(format!(
                "p must lie in [0.5, 1], got {}",
                self.p
            )));
        }
        if self.n == 0 || self.samples == 0 {
            return Err(Error::InvalidConfig("n and samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// Labels `y = -1` and `y = +1` are stored as classes 0 and 1.
///
/// Per sample, in order: one uniform `u` picks `y = +1` iff `u < 0.5`; one
/// uniform picks `x_1 = y` iff it is below `p`; then `n` uniforms `u_i` give
/// `x_i = (y - 1)/2 + u_i`.
pub fn gen_tradeoff(spec: &TradeoffDistSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = rng::stream(spec.seed);
    let dim = spec.n + 1;
    let mut coords = Vec::with_capacity(dim * spec.samples);
    let mut labels = Vec::with_capacity(spec.samples);
    for _ in 0..spec.samples {
        let y = if rng.gen::<f64>() < 0.5 { 1.0 } else { -1.0 };
        let agree = rng.gen::<f64>() < spec.p;
        coords.push(if agree { y } else { -y });
        let low = (y - 1.0) / 2.0;
        for _ in 0..spec.n {
            coords.push(low + rng.gen::<f64>());
        }
        labels.push(if y > 0.0 { 1 } else { 0 });
    }
    LabeledDataset::new(PointSet::from_flat(dim, coords)?, labels)
}

/// The two fixed classifiers of the trade-off task.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceClassifiers {
    /// `sign(x_2 + ... + x_(n+1))`: perfect on clean data, never robust at radius 1.
    pub accurate: LinearModel,
    /// `sign(x_1)`: standard and robust accuracy both `p`.
    pub robust: LinearModel,
}

pub fn reference_classifiers(spec: &TradeoffDistSpec) -> ReferenceClassifiers {
    let dim = spec.n + 1;
    let mut accurate = vec![1.0; dim];
    accurate[0] = 0.0;
    let mut robust = vec![0.0; dim];
    robust[0] = 1.0;
    ReferenceClassifiers {
        accurate: LinearModel::binary(accurate, 0.0),
        robust: LinearModel::binary(robust, 0.0),
    }
}

/// Gaussian clusters truncated to a ball, one per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub centers: Vec<Vec<f64>>,
    /// Samples farther than this from their center are redrawn.
    pub spread: f64,
    /// Per-coordinate standard deviation before truncation.
    pub sigma: f64,
    pub samples_per_class: usize,
    /// Separation the output must admit: centers are required to be more than
    /// `2 * (spread + margin)` apart.
    pub margin: f64,
    pub norm: Norm,
    pub seed: u64,
}

impl BlobSpec {
    pub fn validate(&self) -> Result<()> {
        if self.centers.len() < 2 {
            return Err(Error::InvalidConfig("blobs need at least two centers".into()));
        }
        let dim = self.centers[0].len();
        if dim == 0 || self.centers.iter().any(|c| c.len() != dim) {
            return Err(Error::InvalidConfig(
                "centers must share a positive dimension".into(),
            ));
        }
        if self.centers.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig("center coordinates must be finite".into()));
        }
        if !(self.spread > 0.0 && self.sigma > 0.0 && self.margin >= 0.0) {
            return Err(Error::InvalidConfig(
                "spread and sigma must be positive, margin non-negative".into(),
            ));
        }
        if self.samples_per_class == 0 {
            return Err(Error::InvalidConfig(
                "samples_per_class must be at least 1".into(),
            ));
        }
        let need = 2.0 * (self.spread + self.margin);
        for (a, ca) in self.centers.iter().enumerate() {
            for (b, cb) in self.centers.iter().enumerate().skip(a + 1) {
                let gap = self.norm.dist(ca, cb);
                if gap.is_nan() || gap <= need {
                    return Err(Error::InvalidConfig(format!(
                        "centers {a} and {b} are {gap} apart, need more than 2*(spread+margin) = {need}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Class `c` is drawn from substream `c` of the seed, so classes do not
/// influence each other's samples.
pub fn gen_blobs(spec: &BlobSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let dim = spec.centers[0].len();
    let mut coords = Vec::with_capacity(dim * spec.samples_per_class * spec.centers.len());
    let mut labels = Vec::with_capacity(spec.samples_per_class * spec.centers.len());
    let mut sample = vec![0.0; dim];
    for (class, center) in spec.centers.iter().enumerate() {
        let mut rng = rng::substream(spec.seed, class as u64);
        for _ in 0..spec.samples_per_class {
            loop {
                for (s, c) in sample.iter_mut().zip(center) {
                    let z: f64 = rng.sample(StandardNormal);
                    *s = c + spec.sigma * z;
                }
                if spec.norm.dist(&sample, center) <= spec.spread {
                    break;
                }
            }
            coords.extend_from_slice(&sample);
            labels.push(class);
        }
    }
    LabeledDataset::new(PointSet::from_flat(dim, coords)?, labels)
}

/// `count` i.i.d. uniform points on `[0, 1)^2`, x then y per point.
pub fn gen_uniform_2d(count: usize, seed: u64) -> PointSet {
    let mut rng = rng::stream(seed);
    let coords = (0..2 * count).map(|_| rng.gen::<f64>()).collect();
    PointSet::from_flat(2, coords).expect("uniform draws are finite")
}

/// [`gen_uniform_2d`] as a single-class dataset.
pub fn uniform_2d_dataset(count: usize, seed: u64) -> Result<LabeledDataset> {
    if count == 0 {
        return Err(Error::InvalidConfig("count must be at least 1".into()));
    }
    LabeledDataset::new(gen_uniform_2d(count, seed), vec![0; count])
}
