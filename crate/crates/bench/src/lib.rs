//! Fixtures shared by the benchmarks.

use mfc_core::synthetic::{gen_blobs, uniform_2d_dataset, BlobSpec};
use mfc_core::{LabeledDataset, Norm};

/// Uniform single-class cloud on the unit square.
pub fn cloud(n: usize) -> LabeledDataset {
    uniform_2d_dataset(n, 7).expect("positive count")
}

/// Two well separated 2-d blobs with `per_class` points each.
pub fn two_blobs(per_class: usize) -> LabeledDataset {
    gen_blobs(&BlobSpec {
        centers: vec![vec![0.0, 0.0], vec![6.0, 0.0]],
        spread: 1.0,
        sigma: 0.6,
        samples_per_class: per_class,
        margin: 0.5,
        norm: Norm::L2,
        seed: 11,
    })
    .expect("valid blob spec")
}
