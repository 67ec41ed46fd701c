use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::metric::PointSet;

/// Points with integer class labels in `0..num_classes`.
///
/// Construction rejects empty data, length mismatches and identical points
/// that carry different labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    points: PointSet,
    labels: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl LabeledDataset {
    pub fn new(points: PointSet, labels: Vec<usize>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        if points.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        let num_classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut classes = vec![Vec::new(); num_classes];
        for (i, &y) in labels.iter().enumerate() {
            classes[y].push(i);
        }

        // -0.0 and 0.0 denote the same point.
        let key = |p: &[f64]| -> Vec<u64> { p.iter().map(|c| (c + 0.0).to_bits()).collect() };
        let mut seen: HashMap<Vec<u64>, (usize, usize)> = HashMap::with_capacity(labels.len());
        for (i, p) in points.iter().enumerate() {
            if let Some(&(j, y)) = seen.get(&key(p)) {
                if y != labels[i] {
                    return Err(Error::InvalidDataset(format!(
                        "points {j} and {i} coincide but have labels {y} and {}",
                        labels[i]
                    )));
                }
            } else {
                seen.insert(key(p), (i, labels[i]));
            }
        }

        Ok(LabeledDataset {
            points,
            labels,
            classes,
        })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    /// One past the largest label.
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Labels that occur at least once, ascending.
    pub fn present_classes(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&c| !self.classes[c].is_empty())
            .collect()
    }

    /// Indices of the points labelled `class`, ascending. Empty for absent labels.
    pub fn class_indices(&self, class: usize) -> &[usize] {
        self.classes.get(class).map_or(&[], Vec::as_slice)
    }

    /// Sub-dataset made of the rows at `indices`, keeping their labels.
    pub fn subset(&self, indices: &[usize]) -> Result<LabeledDataset> {
        LabeledDataset::new(
            self.points.select(indices),
            indices.iter().map(|&i| self.labels[i]).collect(),
        )
    }
}
