use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mfc_bench::cloud;
use mfc_core::{hausdorff_distance, relaxed_hausdorff, Norm};
use std::hint::black_box;

fn hausdorff(c: &mut Criterion) {
    let mut group = c.benchmark_group("hausdorff");
    for n in [100, 500, 2000] {
        let a = cloud(n).points().clone();
        let b = mfc_core::synthetic::gen_uniform_2d(n, 99);
        group.bench_with_input(
            BenchmarkId::new("max", n),
            &(a.clone(), b.clone()),
            |bench, (a, b)| bench.iter(|| hausdorff_distance(black_box(a), black_box(b), Norm::L2).unwrap()),
        );
        group.bench_with_input(BenchmarkId::new("mean", n), &(a, b), |bench, (a, b)| {
            bench.iter(|| relaxed_hausdorff(black_box(a), black_box(b), Norm::L2).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, hausdorff);
criterion_main!(benches);
