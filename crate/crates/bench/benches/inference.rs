use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fmcw_gesture::micronet::{build_1d_model, build_2d_model, Model};

fn inference(c: &mut Criterion) {
    let m1 = Model::<f32>::new(&build_1d_model(1920).unwrap()).unwrap();
    let x1 = vec![0.1f32; m1.input_len()];
    c.bench_function("timeseries-1d forward", |b| b.iter(|| m1.forward(black_box(&x1), 1).unwrap()));

    let m2 = Model::<f32>::new(&build_2d_model(60, 48).unwrap()).unwrap();
    let x2 = vec![0.1f32; m2.input_len()];
    c.bench_function("spectrogram-2d forward", |b| b.iter(|| m2.forward(black_box(&x2), 1).unwrap()));
}

criterion_group!(benches, inference);
criterion_main!(benches);
