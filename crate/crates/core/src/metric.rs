//! Distances between points and point sets.
//!
//! All set-level routines work on [`PointSet`], a row-major flattened buffer.
//! Balls are closed: a point at distance exactly `eta` is inside `B_eta`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};

/// The `l_p` norm used for every distance in a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    #[default]
    L2,
    #[serde(rename = "linf")]
    LInf,
}

impl Norm {
    /// Dual norm: `1/p + 1/q = 1`.
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::LInf,
            Norm::L2 => Norm::L2,
            Norm::LInf => Norm::L1,
        }
    }

    /// `||v||_p`.
    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::LInf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    /// `||x - y||_p` without a length check. Callers guarantee equal lengths.
    #[inline]
    pub fn dist(self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
        match self {
            Norm::L1 => diffs.sum(),
            Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Norm::LInf => diffs.fold(0.0, f64::max),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::LInf => "linf",
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" | "1" => Ok(Norm::L1),
            "l2" | "2" => Ok(Norm::L2),
            "linf" | "inf" | "l_inf" => Ok(Norm::LInf),
            other => Err(Error::InvalidConfig(format!("unknown norm `{other}`"))),
        }
    }
}

/// A finite set of points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Build from a flat row-major buffer. Every coordinate must be finite.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDataset("dimension must be at least 1".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: pos / dim });
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().ok_or(Error::EmptySet)?.as_ref().len();
        let mut coords = Vec::with_capacity(dim * rows.len());
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        PointSet::from_flat(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Rows at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> PointSet {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointSet {
            dim: self.dim,
            coords,
        }
    }
}

/// `||x - y||_p`, checking that the dimensions agree.
pub fn lp_distance(x: &[f64], y: &[f64], norm: Norm) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(norm.dist(x, y))
}

fn check_pair(x: &PointSet, y: &PointSet) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

/// Distance from `x` to its nearest neighbour in `set`.
pub(crate) fn nearest(x: &[f64], set: &PointSet, norm: Norm) -> f64 {
    set.iter().map(|y| norm.dist(x, y)).fold(f64::INFINITY, f64::min)
}

/// `d(X -> Y) = sup_x inf_y d(x, y)`. Not symmetric.
pub fn directed_distance(x: &PointSet, y: &PointSet, norm: Norm) -> Result<f64> {
    check_pair(x, y)?;
    Ok(x.iter().map(|p| nearest(p, y, norm)).fold(0.0, f64::max))
}

/// `max{d(X -> Y), d(Y -> X)}`.
pub fn hausdorff_distance(x: &PointSet, y: &PointSet, norm: Norm) -> Result<f64> {
    Ok(directed_distance(x, y, norm)?.max(directed_distance(y, x, norm)?))
}

/// Hausdorff distance with both suprema replaced by means:
/// `(mean_x d(x, Y) + mean_y d(y, X)) / 2`.
pub fn relaxed_hausdorff(x: &PointSet, y: &PointSet, norm: Norm) -> Result<f64> {
    check_pair(x, y)?;
    let mean_to =
        |a: &PointSet, b: &PointSet| a.iter().map(|p| nearest(p, b, norm)).sum::<f64>() / a.len() as f64;
    Ok(0.5 * (mean_to(x, y) + mean_to(y, x)))
}

/// Smallest distance between two points carrying different labels.
pub fn min_interclass_distance(ds: &LabeledDataset, norm: Norm) -> Result<f64> {
    let classes = ds.present_classes();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let mut best = f64::INFINITY;
    for (a, &ca) in classes.iter().enumerate() {
        for &cb in &classes[a + 1..] {
            for &i in ds.class_indices(ca) {
                let xi = ds.points().point(i);
                for &j in ds.class_indices(cb) {
                    best = best.min(norm.dist(xi, ds.points().point(j)));
                }
            }
        }
    }
    Ok(best)
}

/// Whether the closed `eps`-fattenings of the classes are pairwise disjoint.
pub fn is_separated(ds: &LabeledDataset, eps: f64, norm: Norm) -> Result<bool> {
    Ok(min_interclass_distance(ds, norm)? > 2.0 * eps)
}

/// Largest pairwise distance inside `indices`; zero for a single point.
pub fn diameter(points: &PointSet, indices: &[usize], norm: Norm) -> f64 {
    let mut best = 0.0f64;
    for (a, &i) in indices.iter().enumerate() {
        for &j in &indices[a + 1..] {
            best = best.max(norm.dist(points.point(i), points.point(j)));
        }
    }
    best
}
