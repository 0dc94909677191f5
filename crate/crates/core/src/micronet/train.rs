use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::micronet::model::argmax;
use crate::micronet::{Model, ModelSpec, Real};
use crate::scene::mix_seed;

/// Flattened samples with integer labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub inputs: Vec<T>,
    pub labels: Vec<usize>,
    pub sample_len: usize,
}

impl<T: Real> Dataset<T> {
    pub fn new(inputs: Vec<T>, labels: Vec<usize>, sample_len: usize) -> Result<Self> {
        if sample_len == 0 || inputs.len() != labels.len() * sample_len {
            return Err(Error::Shape(format!(
                "{} values for {} samples of {sample_len}",
                inputs.len(),
                labels.len()
            )));
        }
        Ok(Dataset {
            inputs,
            labels,
            sample_len,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sample(&self, i: usize) -> &[T] {
        &self.inputs[i * self.sample_len..(i + 1) * self.sample_len]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub repetitions: usize,
    pub seed: u64,
    /// Evaluate the test set after every epoch, not only at the end.
    pub track_test: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.005,
            batch_size: 16,
            epochs: 100,
            repetitions: 10,
            seed: 0,
            track_test: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Parameter(format!("learning rate {} must be finite and non-negative", self.learning_rate)));
        }
        if self.batch_size == 0 || self.repetitions == 0 {
            return Err(Error::Parameter("batch size and repetitions must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub loss: f64,
    /// Measured on each batch before its update.
    pub train_accuracy: f64,
    pub test_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<u32>>,
}

#[derive(Debug, Clone)]
pub struct TrainRun<T: Real> {
    pub model: Model<T>,
    pub seed: u64,
    pub history: Vec<EpochMetrics>,
    pub test: Option<Evaluation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub repetition: usize,
    pub seed: u64,
    pub history: Vec<EpochMetrics>,
    pub test: Option<Evaluation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatedReport {
    pub runs: Vec<RunSummary>,
    pub mean_accuracy: f64,
    /// Sample standard deviation across repetitions (0 for a single run).
    pub std_accuracy: f64,
    /// Summed over repetitions.
    pub confusion: Vec<Vec<u32>>,
}

const EVAL_BATCH: usize = 64;

pub fn evaluate<T: Real>(model: &Model<T>, data: &Dataset<T>) -> Result<Evaluation> {
    let classes = model.classes();
    let mut confusion = vec![vec![0u32; classes]; classes];
    let mut correct = 0;
    for start in (0..data.len()).step_by(EVAL_BATCH) {
        let end = (start + EVAL_BATCH).min(data.len());
        let probs = model.forward(&data.inputs[start * data.sample_len..end * data.sample_len], end - start)?;
        for (i, row) in probs.chunks_exact(classes).enumerate() {
            let (truth, pred) = (data.labels[start + i], argmax(row));
            if truth < classes {
                confusion[truth][pred] += 1;
            }
            correct += (truth == pred) as usize;
        }
    }
    Ok(Evaluation {
        accuracy: if data.is_empty() { 0.0 } else { correct as f64 / data.len() as f64 },
        confusion,
    })
}

/// Mini-batch SGD on mean cross-entropy. Shuffling and initialisation both
/// derive from `seed`, so a run is bit-reproducible.
pub fn train<T: Real>(
    spec: &ModelSpec,
    train_set: &Dataset<T>,
    test_set: Option<&Dataset<T>>,
    config: &TrainConfig,
    seed: u64,
) -> Result<TrainRun<T>> {
    config.validate()?;
    let spec = spec.clone().with_seed(mix_seed(&[seed, 1]));
    let mut model = Model::<T>::new(&spec)?;
    if train_set.sample_len != model.input_len() {
        return Err(Error::Shape(format!(
            "samples of {} values for a model input of {}",
            train_set.sample_len,
            model.input_len()
        )));
    }
    if train_set.is_empty() {
        return Err(Error::Parameter("empty training set".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[seed, 2]));
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut grads = model.zero_gradients();
    let lr = T::from_f64(config.learning_rate);
    let mut batch_x = Vec::with_capacity(config.batch_size * train_set.sample_len);
    let mut batch_y = Vec::with_capacity(config.batch_size);
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        for chunk in order.chunks(config.batch_size) {
            batch_x.clear();
            batch_y.clear();
            for &i in chunk {
                batch_x.extend_from_slice(train_set.sample(i));
                batch_y.push(train_set.labels[i]);
            }
            grads.zero();
            let step = model.loss_and_grad(&batch_x, &batch_y, &mut grads, false)?;
            let loss = step.loss.to_f64();
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch, loss });
            }
            loss_sum += loss * chunk.len() as f64;
            model.sgd_step(&grads, lr);
            correct += step.correct;
        }
        let loss = loss_sum / train_set.len() as f64;
        if !model.parameters().iter().all(|p| p.iter().all(|v| v.is_finite())) {
            return Err(Error::Divergence { epoch, loss });
        }
        history.push(EpochMetrics {
            epoch,
            loss,
            train_accuracy: correct as f64 / train_set.len() as f64,
            test_accuracy: match test_set {
                Some(t) if config.track_test => Some(evaluate(&model, t)?.accuracy),
                _ => None,
            },
        });
    }
    let test = match test_set {
        Some(t) => Some(evaluate(&model, t)?),
        None => None,
    };
    Ok(TrainRun {
        model,
        seed,
        history,
        test,
    })
}

/// `config.repetitions` independent runs with seeds derived from
/// `config.seed`, executed in parallel. The result does not depend on the
/// thread count.
pub fn train_repeated<T: Real>(
    spec: &ModelSpec,
    train_set: &Dataset<T>,
    test_set: &Dataset<T>,
    config: &TrainConfig,
) -> Result<(RepeatedReport, Vec<Model<T>>)> {
    config.validate()?;
    let runs: Vec<TrainRun<T>> = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| train(spec, train_set, Some(test_set), config, mix_seed(&[config.seed, rep as u64])))
        .collect::<Result<_>>()?;
    let accs: Vec<f64> = runs.iter().map(|r| r.test.as_ref().map_or(0.0, |e| e.accuracy)).collect();
    let (mean, std) = mean_std(&accs);
    let classes = spec.classes();
    let mut confusion = vec![vec![0u32; classes]; classes];
    for r in &runs {
        if let Some(e) = &r.test {
            for (row, add) in confusion.iter_mut().zip(&e.confusion) {
                for (c, a) in row.iter_mut().zip(add) {
                    *c += a;
                }
            }
        }
    }
    let summaries = runs
        .iter()
        .enumerate()
        .map(|(rep, r)| RunSummary {
            repetition: rep,
            seed: r.seed,
            history: r.history.clone(),
            test: r.test.clone(),
        })
        .collect();
    let models = runs.into_iter().map(|r| r.model).collect();
    Ok((
        RepeatedReport {
            runs: summaries,
            mean_accuracy: mean,
            std_accuracy: std,
            confusion,
        },
        models,
    ))
}

pub fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (0.0, 0.0);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() == 1 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (mean, var.sqrt())
}
