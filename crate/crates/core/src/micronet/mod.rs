//! Small convolutional networks trained from scratch, with exact parameter
//! and arithmetic counters.
//!
//! Layers are generic over [`Real`] so the same code trains in `f32` and is
//! gradient-checked in `f64`. Dense and convolution layers run on
//! `matrixmultiply` GEMM (convolutions through im2col).

mod checkpoint;
mod counter;
mod layers;
mod model;
mod real;
mod spec;
mod train;

#[cfg(test)]
mod tests;

pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use counter::{count_ops, LayerCost, LayerReport, OpCountReport, ReferenceFigures, FLOP_CONVENTION};
pub use model::{BatchResult, Gradients, Model};
pub use real::Real;
pub use spec::{
    build_1d_model, build_2d_model, Activation, Conv1DSpec, Conv2DSpec, DenseSpec, Init, LayerSpec, ModelSpec, Padding,
    PoolKind, PoolSpec, Shape,
};
pub use train::{
    evaluate, mean_std, train, train_repeated, Dataset, EpochMetrics, Evaluation, RepeatedReport, RunSummary,
    TrainConfig, TrainRun,
};
