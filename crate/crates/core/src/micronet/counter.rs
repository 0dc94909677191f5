//! Closed-form parameter and arithmetic counts.
//!
//! Conventions: a MAC is one multiply plus one accumulate and counts as two
//! FLOPs. Bias additions are adds. ReLU costs one comparison per output. Max
//! pooling costs `window - 1` comparisons per output; average pooling costs
//! `window - 1` adds and one multiply. Softmax over `n` logits costs `n - 1`
//! comparisons, `2n - 1` adds, `n` multiplies and `n` exponentials.
//! `flops = 2 macs + adds + muls + comparisons + transcendentals`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::micronet::{Activation, LayerSpec, ModelSpec, PoolKind, Shape};

pub const FLOP_CONVENTION: &str = "1 MAC = 2 FLOPs; flops = 2*macs + adds + muls + comparisons + transcendentals";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerCost {
    pub macs: u64,
    pub adds: u64,
    pub muls: u64,
    pub comparisons: u64,
    pub transcendentals: u64,
    pub params: u64,
}

impl LayerCost {
    pub fn flops(&self) -> u64 {
        2 * self.macs + self.adds + self.muls + self.comparisons + self.transcendentals
    }

    fn add(&mut self, other: &LayerCost) {
        self.macs += other.macs;
        self.adds += other.adds;
        self.muls += other.muls;
        self.comparisons += other.comparisons;
        self.transcendentals += other.transcendentals;
        self.params += other.params;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerReport {
    pub layer: String,
    pub output: Shape,
    #[serde(flatten)]
    pub cost: LayerCost,
}

/// Published figures for comparison, when the architecture has them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFigures {
    pub params: u64,
    pub mflops: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpCountReport {
    pub model: String,
    pub convention: String,
    pub layers: Vec<LayerReport>,
    pub total: LayerCost,
    /// `total.flops() / 1e6`.
    pub mflops: f64,
    /// `2 total.macs / 1e6`.
    pub mac_mflops: f64,
    pub reference: Option<ReferenceFigures>,
}

impl OpCountReport {
    pub fn with_reference(mut self, reference: ReferenceFigures) -> Self {
        self.reference = Some(reference);
        self
    }

    /// One line per layer plus totals and, when present, the reference figures.
    pub fn table(&self) -> String {
        let mut s = format!("{} ({})\n", self.model, self.convention);
        s.push_str(&format!(
            "{:<12} {:>10} {:>12} {:>10} {:>10} {:>10}\n",
            "layer", "output", "macs", "adds", "cmp", "params"
        ));
        for l in &self.layers {
            s.push_str(&format!(
                "{:<12} {:>10} {:>12} {:>10} {:>10} {:>10}\n",
                l.layer,
                l.output.to_string(),
                l.cost.macs,
                l.cost.adds,
                l.cost.comparisons,
                l.cost.params
            ));
        }
        s.push_str(&format!(
            "total: {} params, {:.3} MFLOPs ({:.3} from MACs)\n",
            self.total.params, self.mflops, self.mac_mflops
        ));
        if let Some(r) = self.reference {
            s.push_str(&format!("reference: {} params, {:.3} MFLOPs\n", r.params, r.mflops));
        }
        s
    }
}

pub fn count_ops(spec: &ModelSpec) -> Result<OpCountReport> {
    let shapes = spec.output_shapes()?;
    let mut input = spec.input;
    let mut layers = Vec::with_capacity(shapes.len());
    let mut total = LayerCost::default();
    for (layer, &out) in spec.layers.iter().zip(&shapes) {
        let cost = layer_cost(layer, input, out);
        total.add(&cost);
        layers.push(LayerReport {
            layer: layer.name().to_string(),
            output: out,
            cost,
        });
        input = out;
    }
    Ok(OpCountReport {
        model: spec.name.clone(),
        convention: FLOP_CONVENTION.to_string(),
        layers,
        mflops: total.flops() as f64 / 1e6,
        mac_mflops: 2.0 * total.macs as f64 / 1e6,
        total,
        reference: None,
    })
}

fn activation_cost(a: Activation, outputs: u64, cost: &mut LayerCost) {
    match a {
        Activation::None => {}
        Activation::Relu => cost.comparisons += outputs,
        Activation::Softmax => {
            cost.comparisons += outputs - 1;
            cost.adds += 2 * outputs - 1;
            cost.muls += outputs;
            cost.transcendentals += outputs;
        }
    }
}

fn layer_cost(layer: &LayerSpec, input: Shape, out: Shape) -> LayerCost {
    let outputs = out.len() as u64;
    let in_c = input.channels as u64;
    let mut cost = LayerCost::default();
    match *layer {
        LayerSpec::Conv1d(c) => {
            let k = c.kernel as u64;
            cost.macs = outputs * in_c * k;
            cost.adds = outputs;
            cost.params = c.filters as u64 * (in_c * k + 1);
            activation_cost(c.activation, outputs, &mut cost);
        }
        LayerSpec::Conv2d(c) => {
            let k = (c.kernel[0] * c.kernel[1]) as u64;
            cost.macs = outputs * in_c * k;
            cost.adds = outputs;
            cost.params = c.filters as u64 * (in_c * k + 1);
            activation_cost(c.activation, outputs, &mut cost);
        }
        LayerSpec::Pool1d(p) | LayerSpec::Pool2d(p) => {
            let window = match layer {
                LayerSpec::Pool1d(_) => p.size,
                _ => p.size * p.size,
            } as u64;
            match p.kind {
                PoolKind::Max => cost.comparisons = outputs * (window - 1),
                PoolKind::Avg => {
                    cost.adds = outputs * (window - 1);
                    cost.muls = outputs;
                }
            }
        }
        LayerSpec::Flatten => {}
        LayerSpec::Dense(d) => {
            let n_in = input.len() as u64;
            cost.macs = n_in * outputs;
            cost.adds = outputs;
            cost.params = outputs * (n_in + 1);
            activation_cost(d.activation, outputs, &mut cost);
        }
    }
    cost
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::micronet::{build_1d_model, build_2d_model, Conv1DSpec, Conv2DSpec, Padding};

    fn toy(input: Shape, first: LayerSpec) -> ModelSpec {
        ModelSpec::new("toy", input, vec![first, LayerSpec::Flatten, LayerSpec::dense(2, Activation::Softmax)]).unwrap()
    }

    #[test]
    fn dense_four_to_three() {
        let spec = ModelSpec::new(
            "dense",
            Shape::new(4, 1, 1),
            vec![LayerSpec::dense(3, Activation::None), LayerSpec::dense(2, Activation::Softmax)],
        )
        .unwrap();
        let r = count_ops(&spec).unwrap();
        assert_eq!(r.layers[0].cost.macs, 12);
        assert_eq!(r.layers[0].cost.adds, 3);
        assert_eq!(r.layers[0].cost.params, 15);
    }

    #[test]
    fn conv1d_hand_count() {
        let conv = LayerSpec::Conv1d(Conv1DSpec {
            filters: 2,
            kernel: 3,
            padding: Padding::Valid,
            activation: Activation::None,
        });
        let r = count_ops(&toy(Shape::series(1, 10), conv)).unwrap();
        assert_eq!(r.layers[0].output.width, 8);
        assert_eq!(r.layers[0].cost.macs, 48);
    }

    #[test]
    fn conv2d_params_hand_count() {
        let conv = LayerSpec::Conv2d(Conv2DSpec {
            filters: 2,
            kernel: [3, 3],
            padding: Padding::Valid,
            activation: Activation::Relu,
        });
        assert_eq!(count_ops(&toy(Shape::new(1, 5, 5), conv)).unwrap().layers[0].cost.params, 20);
    }

    #[test]
    fn totals_are_sums() {
        let r = count_ops(&build_1d_model(1920).unwrap()).unwrap();
        let macs: u64 = r.layers.iter().map(|l| l.cost.macs).sum();
        let params: u64 = r.layers.iter().map(|l| l.cost.params).sum();
        assert_eq!((r.total.macs, r.total.params), (macs, params));
        assert_eq!(r.total.params, 82_378);
    }

    #[test]
    fn doubling_width_changes_only_first_dense() {
        let a = count_ops(&build_2d_model(60, 48).unwrap()).unwrap();
        let b = count_ops(&build_2d_model(60, 96).unwrap()).unwrap();
        for (i, (x, y)) in a.layers.iter().zip(&b.layers).enumerate() {
            if i == 7 {
                assert_ne!(x.cost.params, y.cost.params);
            } else {
                assert_eq!(x.cost.params, y.cost.params);
            }
        }
    }

    #[test]
    fn one_d_cheaper_than_two_d() {
        let a = count_ops(&build_1d_model(1920).unwrap()).unwrap();
        let b = count_ops(&build_2d_model(60, 48).unwrap()).unwrap();
        assert!(a.mflops < 0.5 * b.mflops, "{} vs {}", a.mflops, b.mflops);
    }
}
