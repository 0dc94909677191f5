use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    None,
    Relu,
    Softmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Padding {
    Valid,
    Same,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolKind {
    Max,
    Avg,
}

/// Stride-1 convolution over the width axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conv1DSpec {
    pub filters: usize,
    pub kernel: usize,
    pub padding: Padding,
    pub activation: Activation,
}

/// Stride-1 convolution, kernel `[height, width]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conv2DSpec {
    pub filters: usize,
    pub kernel: [usize; 2],
    pub padding: Padding,
    pub activation: Activation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseSpec {
    pub units: usize,
    pub activation: Activation,
}

/// Non-overlapping pooling; trailing samples that do not fill a window are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolSpec {
    pub kind: PoolKind,
    pub size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LayerSpec {
    Conv1d(Conv1DSpec),
    Conv2d(Conv2DSpec),
    Pool1d(PoolSpec),
    Pool2d(PoolSpec),
    Flatten,
    Dense(DenseSpec),
}

impl LayerSpec {
    pub fn conv1d(filters: usize, kernel: usize) -> Self {
        LayerSpec::Conv1d(Conv1DSpec {
            filters,
            kernel,
            padding: Padding::Valid,
            activation: Activation::Relu,
        })
    }

    pub fn conv2d(filters: usize, kernel: usize) -> Self {
        LayerSpec::Conv2d(Conv2DSpec {
            filters,
            kernel: [kernel, kernel],
            padding: Padding::Valid,
            activation: Activation::Relu,
        })
    }

    pub fn max_pool1d(size: usize) -> Self {
        LayerSpec::Pool1d(PoolSpec { kind: PoolKind::Max, size })
    }

    pub fn avg_pool1d(size: usize) -> Self {
        LayerSpec::Pool1d(PoolSpec { kind: PoolKind::Avg, size })
    }

    pub fn max_pool2d(size: usize) -> Self {
        LayerSpec::Pool2d(PoolSpec { kind: PoolKind::Max, size })
    }

    pub fn dense(units: usize, activation: Activation) -> Self {
        LayerSpec::Dense(DenseSpec { units, activation })
    }

    pub fn name(&self) -> &'static str {
        match self {
            LayerSpec::Conv1d(_) => "conv1d",
            LayerSpec::Conv2d(_) => "conv2d",
            LayerSpec::Pool1d(p) | LayerSpec::Pool2d(p) => match (self, p.kind) {
                (LayerSpec::Pool1d(_), PoolKind::Max) => "max_pool1d",
                (LayerSpec::Pool1d(_), PoolKind::Avg) => "avg_pool1d",
                (_, PoolKind::Max) => "max_pool2d",
                (_, PoolKind::Avg) => "avg_pool2d",
            },
            LayerSpec::Flatten => "flatten",
            LayerSpec::Dense(_) => "dense",
        }
    }
}

/// Activation tensor shape `channels x height x width`; 1D signals have height 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
}

impl Shape {
    pub fn new(channels: usize, height: usize, width: usize) -> Self {
        Shape {
            channels,
            height,
            width,
        }
    }

    pub fn series(channels: usize, len: usize) -> Self {
        Shape::new(channels, 1, len)
    }

    pub fn len(&self) -> usize {
        self.channels * self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn is_flat(&self) -> bool {
        self.height == 1 && self.width == 1
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.channels, self.height, self.width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Weights uniform in `+-sqrt(6 / fan_in)`, biases zero.
    HeUniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub input: Shape,
    pub layers: Vec<LayerSpec>,
    pub init: Init,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(name: impl Into<String>, input: Shape, layers: Vec<LayerSpec>) -> Result<Self> {
        let spec = ModelSpec {
            name: name.into(),
            input,
            layers,
            init: Init::HeUniform,
            seed: 0,
        };
        spec.output_shapes()?;
        Ok(spec)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Output shape of every layer, in order.
    pub fn output_shapes(&self) -> Result<Vec<Shape>> {
        if self.input.is_empty() {
            return Err(Error::Shape(format!("empty input shape {}", self.input)));
        }
        let mut shape = self.input;
        let mut out = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let err = |msg: String| Error::Shape(format!("layer {i} ({}): {msg}", layer.name()));
            let last = i + 1 == self.layers.len();
            shape = match *layer {
                LayerSpec::Conv1d(c) => {
                    if shape.height != 1 {
                        return Err(err(format!("needs a 1D input, got {shape}")));
                    }
                    check_activation(c.activation, false).map_err(err)?;
                    let w = conv_len(shape.width, c.kernel, c.padding).map_err(err)?;
                    nonzero(c.filters).map_err(err)?;
                    Shape::series(c.filters, w)
                }
                LayerSpec::Conv2d(c) => {
                    check_activation(c.activation, false).map_err(err)?;
                    nonzero(c.filters).map_err(err)?;
                    let h = conv_len(shape.height, c.kernel[0], c.padding).map_err(err)?;
                    let w = conv_len(shape.width, c.kernel[1], c.padding).map_err(err)?;
                    Shape::new(c.filters, h, w)
                }
                LayerSpec::Pool1d(p) => {
                    if shape.height != 1 {
                        return Err(err(format!("needs a 1D input, got {shape}")));
                    }
                    Shape::series(shape.channels, pool_len(shape.width, p.size).map_err(err)?)
                }
                LayerSpec::Pool2d(p) => Shape::new(
                    shape.channels,
                    pool_len(shape.height, p.size).map_err(err)?,
                    pool_len(shape.width, p.size).map_err(err)?,
                ),
                LayerSpec::Flatten => Shape::new(shape.len(), 1, 1),
                LayerSpec::Dense(d) => {
                    if !shape.is_flat() {
                        return Err(err(format!("input {shape} must be flattened first")));
                    }
                    check_activation(d.activation, last).map_err(err)?;
                    nonzero(d.units).map_err(err)?;
                    Shape::new(d.units, 1, 1)
                }
            };
            out.push(shape);
        }
        match self.layers.last() {
            Some(LayerSpec::Dense(DenseSpec {
                activation: Activation::Softmax,
                ..
            })) => Ok(out),
            _ => Err(Error::Shape("the last layer must be a softmax dense layer".into())),
        }
    }

    pub fn classes(&self) -> usize {
        match self.layers.last() {
            Some(LayerSpec::Dense(d)) => d.units,
            _ => 0,
        }
    }
}

fn nonzero(v: usize) -> std::result::Result<(), String> {
    if v == 0 {
        Err("zero units".into())
    } else {
        Ok(())
    }
}

fn check_activation(a: Activation, last: bool) -> std::result::Result<(), String> {
    if a == Activation::Softmax && !last {
        Err("softmax is only allowed on the final layer".into())
    } else {
        Ok(())
    }
}

fn conv_len(len: usize, kernel: usize, padding: Padding) -> std::result::Result<usize, String> {
    if kernel == 0 {
        return Err("zero kernel".into());
    }
    match padding {
        Padding::Same => Ok(len),
        Padding::Valid if kernel <= len => Ok(len - kernel + 1),
        Padding::Valid => Err(format!("kernel {kernel} longer than input {len}")),
    }
}

fn pool_len(len: usize, size: usize) -> std::result::Result<usize, String> {
    if size == 0 || size > len {
        Err(format!("pool size {size} does not fit input {len}"))
    } else {
        Ok(len / size)
    }
}

/// Time-series classifier: average pooling by 4, three conv/max-pool stages
/// of 32 filters (kernels 64, 16, 16), then dense 32 and softmax 10.
pub fn build_1d_model(input_len: usize) -> Result<ModelSpec> {
    if input_len < 256 {
        return Err(Error::Shape(format!("input length {input_len} below 256")));
    }
    ModelSpec::new(
        "timeseries-1d",
        Shape::series(4, input_len),
        vec![
            LayerSpec::avg_pool1d(4),
            LayerSpec::conv1d(32, 64),
            LayerSpec::max_pool1d(2),
            LayerSpec::conv1d(32, 16),
            LayerSpec::max_pool1d(2),
            LayerSpec::conv1d(32, 16),
            LayerSpec::max_pool1d(2),
            LayerSpec::Flatten,
            LayerSpec::dense(32, Activation::Relu),
            LayerSpec::dense(10, Activation::Softmax),
        ],
    )
}

/// Spectrogram classifier on `4 x frames x width` stacked maps: conv 5x5/32,
/// 3x3/64, 3x3/64, each followed by 2x2 max pooling, then dense 32 and
/// softmax 10.
pub fn build_2d_model(frames: usize, width: usize) -> Result<ModelSpec> {
    ModelSpec::new(
        "spectrogram-2d",
        Shape::new(4, frames, width),
        vec![
            LayerSpec::conv2d(32, 5),
            LayerSpec::max_pool2d(2),
            LayerSpec::conv2d(64, 3),
            LayerSpec::max_pool2d(2),
            LayerSpec::conv2d(64, 3),
            LayerSpec::max_pool2d(2),
            LayerSpec::Flatten,
            LayerSpec::dense(32, Activation::Relu),
            LayerSpec::dense(10, Activation::Softmax),
        ],
    )
}
