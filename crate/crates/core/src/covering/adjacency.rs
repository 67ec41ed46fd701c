use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{Norm, PointSet};

/// Sparse boolean matrix `A(eta)` with `a_ij = 1` iff `d(x_i, x_j) <= eta`.
///
/// Row `i` lists, in ascending order, every point inside the closed ball of
/// radius `eta` around point `i`. The matrix is symmetric and has a full
/// diagonal, so row `i` is both "what `x_i` covers" and "who covers `x_i`".
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    rows: Vec<Vec<usize>>,
    eta: f64,
}

impl AdjacencyMatrix {
    /// Build from explicit rows, checking symmetry and the diagonal.
    pub fn from_rows(rows: Vec<Vec<usize>>, eta: f64) -> Result<Self> {
        let n = rows.len();
        let mut rows = rows;
        for row in rows.iter_mut() {
            row.sort_unstable();
            row.dedup();
        }
        for (i, row) in rows.iter().enumerate() {
            if row.binary_search(&i).is_err() {
                return Err(Error::InvalidConfig(format!("row {i} misses its diagonal entry")));
            }
            for &j in row {
                if j >= n || rows[j].binary_search(&i).is_err() {
                    return Err(Error::InvalidConfig(format!(
                        "adjacency is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(AdjacencyMatrix { rows, eta })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    /// True when every point has at least one selected index in its row.
    pub fn is_cover(&self, selection: &[usize]) -> bool {
        let mut covered = vec![false; self.len()];
        for &s in selection {
            for &j in &self.rows[s] {
                covered[j] = true;
            }
        }
        covered.into_iter().all(|c| c)
    }
}

/// `A(eta)` over `points`. Rows are computed in parallel; each row is
/// independent so the result does not depend on the thread count.
pub fn build_adjacency(points: &PointSet, eta: f64, norm: Norm) -> AdjacencyMatrix {
    let n = points.len();
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = points.point(i);
            (0..n)
                .filter(|&j| j == i || norm.dist(xi, points.point(j)) <= eta)
                .collect()
        })
        .collect();
    AdjacencyMatrix { rows, eta }
}
