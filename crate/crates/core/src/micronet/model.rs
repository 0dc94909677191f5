use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::micronet::layers::{softmax_rows, Cache, Conv, Dense, Layer, Pool};
use crate::micronet::{Activation, LayerSpec, ModelSpec, Padding, Real};

/// A network instantiated from a [`ModelSpec`].
#[derive(Debug, Clone)]
pub struct Model<T: Real> {
    spec: ModelSpec,
    layers: Vec<Layer<T>>,
}

/// Outcome of one forward/backward pass.
#[derive(Debug, Clone)]
pub struct BatchResult<T> {
    /// Mean cross-entropy.
    pub loss: T,
    /// Samples whose most probable class equals the label.
    pub correct: usize,
    pub input_grad: Option<Vec<T>>,
}

/// Parameter gradients, laid out like [`Model::parameters`].
#[derive(Debug, Clone)]
pub struct Gradients<T> {
    pub tensors: Vec<Vec<T>>,
}

impl<T: Real> Gradients<T> {
    pub fn zero(&mut self) {
        for t in &mut self.tensors {
            t.fill(T::ZERO);
        }
    }
}

impl<T: Real> Model<T> {
    /// Builds the layers and draws weights from the spec's seed.
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        let shapes = spec.output_shapes()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut input = spec.input;
        let mut layers = Vec::with_capacity(shapes.len());
        let mut he = |fan_in: usize, n: usize| -> Vec<T> {
            let limit = (6.0 / fan_in as f64).sqrt();
            (0..n).map(|_| T::from_f64(rng.random_range(-limit..limit))).collect()
        };
        for (layer, &out) in spec.layers.iter().zip(&shapes) {
            let built = match *layer {
                LayerSpec::Conv1d(c) => {
                    let fan_in = input.channels * c.kernel;
                    Layer::Conv(Conv {
                        input,
                        output: out,
                        kernel: [1, c.kernel],
                        pad: [0, pad_before(c.kernel, c.padding)],
                        relu: c.activation == Activation::Relu,
                        weight: he(fan_in, c.filters * fan_in),
                        bias: vec![T::ZERO; c.filters],
                    })
                }
                LayerSpec::Conv2d(c) => {
                    let fan_in = input.channels * c.kernel[0] * c.kernel[1];
                    Layer::Conv(Conv {
                        input,
                        output: out,
                        kernel: c.kernel,
                        pad: [pad_before(c.kernel[0], c.padding), pad_before(c.kernel[1], c.padding)],
                        relu: c.activation == Activation::Relu,
                        weight: he(fan_in, c.filters * fan_in),
                        bias: vec![T::ZERO; c.filters],
                    })
                }
                LayerSpec::Pool1d(p) => Layer::Pool(Pool {
                    input,
                    output: out,
                    kind: p.kind,
                    size: [1, p.size],
                }),
                LayerSpec::Pool2d(p) => Layer::Pool(Pool {
                    input,
                    output: out,
                    kind: p.kind,
                    size: [p.size, p.size],
                }),
                LayerSpec::Flatten => Layer::Flatten,
                LayerSpec::Dense(d) => {
                    let fan_in = input.len();
                    Layer::Dense(Dense {
                        inputs: fan_in,
                        outputs: d.units,
                        activation: d.activation,
                        weight: he(fan_in, d.units * fan_in),
                        bias: vec![T::ZERO; d.units],
                    })
                }
            };
            layers.push(built);
            input = out;
        }
        Ok(Model {
            spec: spec.clone(),
            layers,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn input_len(&self) -> usize {
        self.spec.input.len()
    }

    pub fn classes(&self) -> usize {
        self.spec.classes()
    }

    /// Weight and bias tensors of every trainable layer, in layer order.
    pub fn parameters(&self) -> Vec<&[T]> {
        let mut out: Vec<&[T]> = Vec::new();
        for l in &self.layers {
            match l {
                Layer::Conv(c) => out.extend([c.weight.as_slice(), c.bias.as_slice()]),
                Layer::Dense(d) => out.extend([d.weight.as_slice(), d.bias.as_slice()]),
                _ => {}
            }
        }
        out
    }

    pub fn parameters_mut(&mut self) -> Vec<&mut [T]> {
        let mut out: Vec<&mut [T]> = Vec::new();
        for l in &mut self.layers {
            match l {
                Layer::Conv(c) => out.extend([c.weight.as_mut_slice(), c.bias.as_mut_slice()]),
                Layer::Dense(d) => out.extend([d.weight.as_mut_slice(), d.bias.as_mut_slice()]),
                _ => {}
            }
        }
        out
    }

    pub fn param_count(&self) -> usize {
        self.parameters().iter().map(|p| p.len()).sum()
    }

    pub fn zero_gradients(&self) -> Gradients<T> {
        Gradients {
            tensors: self.parameters().iter().map(|p| vec![T::ZERO; p.len()]).collect(),
        }
    }

    fn check_input(&self, input: &[T], batch: usize) -> Result<()> {
        if input.len() != batch * self.input_len() {
            return Err(Error::Shape(format!(
                "input of {} values for batch {batch} x {}",
                input.len(),
                self.input_len()
            )));
        }
        Ok(())
    }

    /// Class probabilities, `batch x classes`.
    pub fn forward(&self, input: &[T], batch: usize) -> Result<Vec<T>> {
        self.check_input(input, batch)?;
        let mut x = input.to_vec();
        for l in &self.layers {
            x = match l {
                Layer::Conv(c) => c.forward(&x, batch, None),
                Layer::Pool(p) => p.forward(&x, batch, None),
                Layer::Flatten => x,
                Layer::Dense(d) => d.forward(&x, batch),
            };
        }
        softmax_rows(&mut x, self.classes());
        Ok(x)
    }

    pub fn predict(&self, input: &[T], batch: usize) -> Result<Vec<usize>> {
        let probs = self.forward(input, batch)?;
        Ok(probs.chunks_exact(self.classes()).map(argmax).collect())
    }

    /// Mean cross-entropy over the batch; parameter gradients are added to
    /// `grads`. With `want_input` the gradient with respect to the input is
    /// returned as well.
    pub fn loss_and_grad(
        &self,
        input: &[T],
        labels: &[usize],
        grads: &mut Gradients<T>,
        want_input: bool,
    ) -> Result<BatchResult<T>> {
        let batch = labels.len();
        self.check_input(input, batch)?;
        let classes = self.classes();
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::Parameter(format!("label {bad} outside 0..{classes}")));
        }
        let mut acts: Vec<Vec<T>> = Vec::with_capacity(self.layers.len() + 1);
        let mut caches: Vec<Cache<T>> = vec![Cache::default(); self.layers.len()];
        acts.push(input.to_vec());
        for (l, cache) in self.layers.iter().zip(caches.iter_mut()) {
            let x = acts.last().unwrap();
            let y = match l {
                Layer::Conv(c) => c.forward(x, batch, Some(cache)),
                Layer::Pool(p) => p.forward(x, batch, Some(cache)),
                Layer::Flatten => x.clone(),
                Layer::Dense(d) => d.forward(x, batch),
            };
            acts.push(y);
        }
        let mut probs = acts.last().unwrap().clone();
        softmax_rows(&mut probs, classes);
        let inv = T::from_f64(1.0 / batch as f64);
        let mut loss = T::ZERO;
        let mut correct = 0;
        let mut grad = probs;
        for (b, row) in grad.chunks_exact_mut(classes).enumerate() {
            correct += (argmax(row) == labels[b]) as usize;
            loss -= row[labels[b]].max(T::from_f64(1e-30)).ln();
            row[labels[b]] -= T::ONE;
            for v in row.iter_mut() {
                *v *= inv;
            }
        }
        loss *= inv;

        let mut slot = grads.tensors.len();
        for (i, l) in self.layers.iter().enumerate().rev() {
            let need = want_input || i > 0;
            let next = match l {
                Layer::Conv(c) => {
                    slot -= 2;
                    let (w, b) = grads.tensors.split_at_mut(slot + 1);
                    c.backward(&acts[i + 1], &mut grad, batch, &caches[i], &mut w[slot], &mut b[0], need)
                }
                Layer::Dense(d) => {
                    slot -= 2;
                    let (w, b) = grads.tensors.split_at_mut(slot + 1);
                    d.backward(&acts[i], &acts[i + 1], &mut grad, batch, &mut w[slot], &mut b[0], need)
                }
                Layer::Pool(p) => need.then(|| p.backward(&grad, batch, &caches[i])),
                Layer::Flatten => need.then(|| std::mem::take(&mut grad)),
            };
            match next {
                Some(g) => grad = g,
                None => break,
            }
        }
        Ok(BatchResult {
            loss,
            correct,
            input_grad: want_input.then_some(grad),
        })
    }

    /// `p -= lr * g` for every parameter.
    pub fn sgd_step(&mut self, grads: &Gradients<T>, lr: T) {
        for (p, g) in self.parameters_mut().into_iter().zip(&grads.tensors) {
            for (w, d) in p.iter_mut().zip(g) {
                *w -= lr * *d;
            }
        }
    }

    /// Replaces all parameters from a flat list in [`Model::parameters`] order.
    pub fn set_parameters(&mut self, flat: &[T]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::Shape(format!(
                "{} values for {} parameters",
                flat.len(),
                self.param_count()
            )));
        }
        let mut at = 0;
        for p in self.parameters_mut() {
            p.copy_from_slice(&flat[at..at + p.len()]);
            at += p.len();
        }
        Ok(())
    }

    pub fn flat_parameters(&self) -> Vec<T> {
        self.parameters().concat()
    }
}

fn pad_before(kernel: usize, padding: Padding) -> usize {
    match padding {
        Padding::Valid => 0,
        Padding::Same => (kernel - 1) / 2,
    }
}

pub(crate) fn argmax<T: Real>(row: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in row.iter().enumerate() {
        if *v > row[best] {
            best = i;
        }
    }
    best
}
