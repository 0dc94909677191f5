use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fmcw_gesture::conventional::spectrograms;
use fmcw_gesture::harness::{bench_cube, bench_radar};
use fmcw_gesture::timeseries::extract_features;
use fmcw_gesture::BeamformingGrid;

fn pipelines(c: &mut Criterion) {
    let grid = BeamformingGrid::default();
    let mut group = c.benchmark_group("frame");
    for (n, m) in [(16, 32), (32, 64), (64, 128), (128, 256)] {
        let config = bench_radar(n, m);
        let cube = bench_cube(&config, 1, 7).unwrap();
        let id = format!("{n}x{m}");
        group.bench_with_input(BenchmarkId::new("timeseries", &id), &cube, |b, cube| {
            b.iter(|| extract_features(black_box(cube)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fft", &id), &cube, |b, cube| {
            b.iter(|| spectrograms(black_box(cube), &grid).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pipelines);
criterion_main!(benches);
