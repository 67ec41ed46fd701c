#![allow(dead_code)]

use mfc_core::{build_adjacency, AdjacencyMatrix, LabeledDataset, Norm, PointSet};

/// Smallest cover by exhaustive search, lexicographically smallest among
/// those of minimum size. Subsets of equal size are visited in
/// lexicographic order.
pub fn brute_min_cover(adj: &AdjacencyMatrix) -> Vec<usize> {
    let n = adj.len();
    assert!(n <= 20);
    for size in 1..=n {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            if adj.is_cover(&combo) {
                return combo;
            }
            let mut i = size;
            while i > 0 && combo[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            combo[i - 1] += 1;
            for j in i..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    unreachable!("the full set always covers")
}

pub fn class_points(ds: &LabeledDataset, class: usize) -> PointSet {
    ds.points().select(ds.class_indices(class))
}

/// Label-respecting minimum cover size by brute force.
pub fn brute_label_cover_size(ds: &LabeledDataset, eta: f64, norm: Norm) -> usize {
    ds.present_classes()
        .into_iter()
        .map(|c| brute_min_cover(&build_adjacency(&class_points(ds, c), eta, norm)).len())
        .sum()
}

/// Optimal radius for `k` centers in total: the smallest candidate radius
/// (zero or a same-class pairwise distance) whose minimum cover fits.
pub fn brute_k_radius(ds: &LabeledDataset, k: usize, norm: Norm) -> f64 {
    let mut candidates = vec![0.0];
    for c in ds.present_classes() {
        let idx = ds.class_indices(c);
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                candidates.push(norm.dist(ds.points().point(i), ds.points().point(j)));
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates
        .into_iter()
        .find(|&r| brute_label_cover_size(ds, r, norm) <= k)
        .expect("the largest distance admits one center per class")
}

/// Same as [`brute_k_radius`] with `k` centers inside every class.
pub fn brute_k_radius_per_class(ds: &LabeledDataset, k: usize, norm: Norm) -> f64 {
    ds.present_classes()
        .into_iter()
        .map(|c| {
            let sub = ds.subset(ds.class_indices(c)).unwrap();
            brute_k_radius(&sub, k, norm)
        })
        .fold(0.0, f64::max)
}

pub fn dataset(dim: usize, coords: Vec<f64>, labels: Vec<usize>) -> Option<LabeledDataset> {
    LabeledDataset::new(PointSet::from_flat(dim, coords).ok()?, labels).ok()
}
