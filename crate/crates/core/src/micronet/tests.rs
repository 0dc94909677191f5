use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn random_input(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Small model exercising one family of layers, shapes drawn from `rng`.
fn toy_models(rng: &mut ChaCha8Rng) -> Vec<ModelSpec> {
    let c = rng.random_range(1..=3);
    let w = rng.random_range(10..=16);
    let h = rng.random_range(10..=12);
    let f = rng.random_range(2..=4);
    let classes = rng.random_range(2..=4);
    let k = rng.random_range(2..=4);
    let conv1 = |padding, activation| {
        LayerSpec::Conv1d(Conv1DSpec {
            filters: f,
            kernel: k,
            padding,
            activation,
        })
    };
    let conv2 = |padding, activation| {
        LayerSpec::Conv2d(Conv2DSpec {
            filters: f,
            kernel: [k, 3],
            padding,
            activation,
        })
    };
    let tail = |mut v: Vec<LayerSpec>| {
        v.extend([
            LayerSpec::Flatten,
            LayerSpec::dense(5, Activation::Relu),
            LayerSpec::dense(3, Activation::None),
            LayerSpec::dense(classes, Activation::Softmax),
        ]);
        v
    };
    vec![
        ModelSpec::new(
            "conv1d",
            Shape::series(c, w),
            tail(vec![
                LayerSpec::avg_pool1d(2),
                conv1(Padding::Valid, Activation::Relu),
                LayerSpec::max_pool1d(2),
                conv1(Padding::Same, Activation::None),
            ]),
        )
        .unwrap(),
        ModelSpec::new(
            "conv2d",
            Shape::new(c, h, w),
            tail(vec![
                conv2(Padding::Valid, Activation::Relu),
                LayerSpec::max_pool2d(2),
                conv2(Padding::Same, Activation::Relu),
                LayerSpec::Pool2d(PoolSpec {
                    kind: PoolKind::Avg,
                    size: 2,
                }),
            ]),
        )
        .unwrap(),
    ]
}

fn loss_at(model: &Model<f64>, x: &[f64], labels: &[usize]) -> f64 {
    let mut g = model.zero_gradients();
    model.loss_and_grad(x, labels, &mut g, false).unwrap().loss
}

fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / (a.abs() + n.abs()).max(1e-6)
}

#[test]
fn gradients_match_finite_differences() {
    let h = 1e-5;
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for spec in toy_models(&mut rng) {
            let batch = 3;
            let mut model = Model::<f64>::new(&spec.clone().with_seed(seed)).unwrap();
            // nonzero biases so every parameter carries signal
            let flat: Vec<f64> = model.flat_parameters().iter().map(|v| v + rng.random_range(-0.1..0.1)).collect();
            model.set_parameters(&flat).unwrap();
            let x = random_input(&mut rng, batch * model.input_len());
            let labels: Vec<usize> = (0..batch).map(|_| rng.random_range(0..model.classes())).collect();
            let mut grads = model.zero_gradients();
            let res = model.loss_and_grad(&x, &labels, &mut grads, true).unwrap();
            let analytic: Vec<f64> = grads.tensors.concat();

            for i in 0..flat.len() {
                let mut p = flat.clone();
                p[i] = flat[i] + h;
                model.set_parameters(&p).unwrap();
                let up = loss_at(&model, &x, &labels);
                p[i] = flat[i] - h;
                model.set_parameters(&p).unwrap();
                let down = loss_at(&model, &x, &labels);
                let numeric = (up - down) / (2.0 * h);
                let e = rel_err(analytic[i], numeric);
                worst = worst.max(e);
                assert!(e < 1e-4, "{} seed {seed} param {i}: {} vs {numeric}", spec.name, analytic[i]);
            }
            model.set_parameters(&flat).unwrap();
            let dx = res.input_grad.unwrap();
            for i in 0..x.len() {
                let mut xp = x.clone();
                xp[i] += h;
                let up = loss_at(&model, &xp, &labels);
                xp[i] -= 2.0 * h;
                let down = loss_at(&model, &xp, &labels);
                let numeric = (up - down) / (2.0 * h);
                assert!(rel_err(dx[i], numeric) < 1e-4, "{} seed {seed} input {i}: {} vs {numeric}", spec.name, dx[i]);
            }
        }
    }
    assert!(worst < 1e-4);
}

#[test]
fn softmax_gradient_is_p_minus_onehot() {
    let spec = ModelSpec::new(
        "logits",
        Shape::new(3, 1, 1),
        vec![LayerSpec::dense(4, Activation::Softmax)],
    )
    .unwrap();
    let model = Model::<f64>::new(&spec).unwrap();
    let x = vec![0.3, -0.7, 1.1];
    let probs = model.forward(&x, 1).unwrap();
    let mut g = model.zero_gradients();
    model.loss_and_grad(&x, &[2], &mut g, false).unwrap();
    // the bias gradient of the only layer is exactly dL/dlogits
    for (j, (gb, p)) in g.tensors[1].iter().zip(&probs).enumerate() {
        let expected = p - if j == 2 { 1.0 } else { 0.0 };
        assert!((gb - expected).abs() < 1e-9);
    }
}

#[test]
fn zero_input_zero_bias_is_uniform() {
    for spec in [build_1d_model(1920).unwrap(), build_2d_model(60, 48).unwrap()] {
        let model = Model::<f32>::new(&spec).unwrap();
        let probs = model.forward(&vec![0.0; model.input_len()], 1).unwrap();
        assert!(probs.iter().all(|p| (p - 0.1).abs() < 1e-6));
    }
}

#[test]
fn probabilities_sum_to_one() {
    let spec = build_1d_model(1024).unwrap();
    let model = Model::<f64>::new(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = random_input(&mut rng, 2 * model.input_len());
    for row in model.forward(&x, 2).unwrap().chunks(10) {
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn allocated_parameters_match_counter() {
    for spec in [build_1d_model(1920).unwrap(), build_2d_model(60, 48).unwrap()] {
        let model = Model::<f32>::new(&spec).unwrap();
        assert_eq!(model.param_count() as u64, count_ops(&spec).unwrap().total.params);
    }
}

/// Two classes separated by the sign of a ramp's slope.
fn toy_series(n: usize, seed: u64) -> Dataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = 16;
    let mut inputs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let label = i % 2;
        let slope = if label == 0 { 1.0 } else { -1.0 } * rng.random_range(0.5..1.5);
        for t in 0..len {
            inputs.push(slope * (t as f64 / len as f64 - 0.5) + rng.random_range(-0.1..0.1));
        }
        labels.push(label);
    }
    Dataset::new(inputs, labels, len).unwrap()
}

fn toy_spec() -> ModelSpec {
    ModelSpec::new(
        "toy",
        Shape::series(1, 16),
        vec![
            LayerSpec::conv1d(4, 3),
            LayerSpec::max_pool1d(2),
            LayerSpec::Flatten,
            LayerSpec::dense(2, Activation::Softmax),
        ],
    )
    .unwrap()
}

#[test]
fn separable_toy_is_learned() {
    let data = toy_series(64, 1);
    // separability oracle: the least-squares slope sign classifies every sample
    for i in 0..data.len() {
        let s = data.sample(i);
        let slope: f64 = s.iter().enumerate().map(|(t, v)| (t as f64 - 7.5) * v).sum();
        assert_eq!((slope < 0.0) as usize, data.labels[i]);
    }
    let config = TrainConfig {
        epochs: 50,
        batch_size: 4,
        ..TrainConfig::default()
    };
    let run = train(&toy_spec(), &data, None, &config, 3).unwrap();
    let acc = evaluate(&run.model, &data).unwrap().accuracy;
    assert!(acc >= 0.99, "{acc}");
}

#[test]
fn loss_decreases_over_first_epochs() {
    let data = toy_series(64, 2);
    let config = TrainConfig {
        epochs: 5,
        ..TrainConfig::default()
    };
    let run = train(&toy_spec(), &data, None, &config, 5).unwrap();
    for w in run.history.windows(2) {
        assert!(w[1].loss < w[0].loss, "{:?}", run.history);
    }
}

#[test]
fn zero_learning_rate_keeps_parameters() {
    let data = toy_series(16, 3);
    let config = TrainConfig {
        learning_rate: 0.0,
        epochs: 3,
        ..TrainConfig::default()
    };
    let run = train(&toy_spec(), &data, None, &config, 9).unwrap();
    let fresh = Model::<f64>::new(&toy_spec().with_seed(crate::scene::mix_seed(&[9, 1]))).unwrap();
    assert_eq!(run.model.flat_parameters(), fresh.flat_parameters());
}

#[test]
fn training_is_bit_reproducible() {
    let data = toy_series(32, 4);
    let config = TrainConfig {
        epochs: 4,
        ..TrainConfig::default()
    };
    let a = train(&toy_spec(), &data, Some(&data), &config, 11).unwrap();
    let b = train(&toy_spec(), &data, Some(&data), &config, 11).unwrap();
    assert_eq!(a.model.flat_parameters(), b.model.flat_parameters());
    assert_eq!(a.history, b.history);
}

#[test]
fn repeated_runs_are_deterministic() {
    let data = toy_series(32, 6);
    let config = TrainConfig {
        epochs: 2,
        repetitions: 3,
        ..TrainConfig::default()
    };
    let (a, _) = train_repeated(&toy_spec(), &data, &data, &config).unwrap();
    let (b, _) = train_repeated(&toy_spec(), &data, &data, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.runs.len(), 3);
    let total: u32 = a.confusion.iter().flatten().sum();
    assert_eq!(total as usize, 3 * data.len());
}

#[test]
fn divergence_reports_epoch() {
    let mut data = toy_series(8, 7);
    data.inputs[0] = f64::NAN;
    let config = TrainConfig {
        epochs: 2,
        ..TrainConfig::default()
    };
    match train(&toy_spec(), &data, None, &config, 1) {
        Err(crate::Error::Divergence { epoch, .. }) => assert_eq!(epoch, 0),
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn checkpoint_round_trip() {
    let spec = build_1d_model(1024).unwrap().with_seed(8);
    let model = Model::<f32>::new(&spec).unwrap();
    let extra = serde_json::json!({"mean": [1.0, 2.0]});
    let bytes = encode_checkpoint(&model, &extra).unwrap();
    let (back, e) = decode_checkpoint::<f32>(&bytes).unwrap();
    assert_eq!(back.flat_parameters(), model.flat_parameters());
    assert_eq!(e, extra);
    let mut bad = bytes.clone();
    bad[4] = 9;
    assert!(matches!(decode_checkpoint::<f32>(&bad), Err(crate::Error::Format { offset: 4, .. })));
    assert!(decode_checkpoint::<f32>(&bytes[..bytes.len() - 1]).is_err());
}
