//! Runtime layers. Activations are batch-major `[b][c][h][w]`; 1D layers run
//! as 2D layers with height 1.

use crate::micronet::{Activation, PoolKind, Real, Shape};

#[derive(Debug, Clone)]
pub(crate) struct Conv<T> {
    pub input: Shape,
    pub output: Shape,
    pub kernel: [usize; 2],
    /// Zero padding before the first row / column.
    pub pad: [usize; 2],
    pub relu: bool,
    /// `[filters][in_c][kh][kw]`.
    pub weight: Vec<T>,
    pub bias: Vec<T>,
}

#[derive(Debug, Clone)]
pub(crate) struct Pool {
    pub input: Shape,
    pub output: Shape,
    pub kind: PoolKind,
    pub size: [usize; 2],
}

#[derive(Debug, Clone)]
pub(crate) struct Dense<T> {
    pub inputs: usize,
    pub outputs: usize,
    pub activation: Activation,
    /// `[outputs][inputs]`.
    pub weight: Vec<T>,
    pub bias: Vec<T>,
}

#[derive(Debug, Clone)]
pub(crate) enum Layer<T> {
    Conv(Conv<T>),
    Pool(Pool),
    Flatten,
    Dense(Dense<T>),
}

/// Per-layer scratch kept from the forward pass for backpropagation.
#[derive(Debug, Clone, Default)]
pub(crate) struct Cache<T> {
    pub cols: Vec<T>,
    pub argmax: Vec<u32>,
}

impl<T: Real> Conv<T> {
    fn patch(&self) -> usize {
        self.input.channels * self.kernel[0] * self.kernel[1]
    }

    fn positions(&self) -> usize {
        self.output.height * self.output.width
    }

    /// Rows `(c, i, j)`, columns `(oh, ow)`.
    fn im2col(&self, x: &[T], cols: &mut [T]) {
        let (ih, iw) = (self.input.height, self.input.width);
        let (oh, ow) = (self.output.height, self.output.width);
        let [kh, kw] = self.kernel;
        let [ph, pw] = self.pad;
        let p = oh * ow;
        for c in 0..self.input.channels {
            for i in 0..kh {
                for j in 0..kw {
                    let row = &mut cols[((c * kh + i) * kw + j) * p..][..p];
                    let lo = pw.saturating_sub(j).min(ow);
                    let hi = (iw + pw).saturating_sub(j).min(ow).max(lo);
                    for y in 0..oh {
                        let dst = &mut row[y * ow..(y + 1) * ow];
                        let sy = (y + i) as isize - ph as isize;
                        if sy < 0 || sy >= ih as isize {
                            dst.fill(T::ZERO);
                            continue;
                        }
                        dst[..lo].fill(T::ZERO);
                        dst[hi..].fill(T::ZERO);
                        if hi > lo {
                            let src = &x[(c * ih + sy as usize) * iw + lo + j - pw..][..hi - lo];
                            dst[lo..hi].copy_from_slice(src);
                        }
                    }
                }
            }
        }
    }

    fn col2im(&self, cols: &[T], dx: &mut [T]) {
        let (ih, iw) = (self.input.height, self.input.width);
        let (oh, ow) = (self.output.height, self.output.width);
        let [kh, kw] = self.kernel;
        let [ph, pw] = self.pad;
        let p = oh * ow;
        for c in 0..self.input.channels {
            for i in 0..kh {
                for j in 0..kw {
                    let row = &cols[((c * kh + i) * kw + j) * p..][..p];
                    let lo = pw.saturating_sub(j).min(ow);
                    let hi = (iw + pw).saturating_sub(j).min(ow).max(lo);
                    for y in 0..oh {
                        let sy = (y + i) as isize - ph as isize;
                        if sy < 0 || sy >= ih as isize || hi == lo {
                            continue;
                        }
                        let dst = &mut dx[(c * ih + sy as usize) * iw + lo + j - pw..][..hi - lo];
                        for (d, s) in dst.iter_mut().zip(&row[y * ow + lo..y * ow + hi]) {
                            *d += *s;
                        }
                    }
                }
            }
        }
    }

    pub fn forward(&self, x: &[T], batch: usize, cache: Option<&mut Cache<T>>) -> Vec<T> {
        let (ck, p, o) = (self.patch(), self.positions(), self.output.channels);
        let mut y = vec![T::ZERO; batch * o * p];
        let mut local = Vec::new();
        let cols = match cache {
            Some(c) => {
                c.cols.resize(batch * ck * p, T::ZERO);
                &mut c.cols
            }
            None => {
                local.resize(ck * p, T::ZERO);
                &mut local
            }
        };
        let per_sample = cols.len() == batch * ck * p;
        for b in 0..batch {
            let cb = if per_sample { &mut cols[b * ck * p..][..ck * p] } else { &mut cols[..] };
            self.im2col(&x[b * self.input.len()..][..self.input.len()], cb);
            let yb = &mut y[b * o * p..][..o * p];
            for (f, row) in yb.chunks_exact_mut(p).enumerate() {
                row.fill(self.bias[f]);
            }
            T::gemm(o, ck, p, T::ONE, &self.weight, ck as isize, 1, cb, p as isize, 1, T::ONE, yb, p as isize, 1);
        }
        if self.relu {
            relu_in_place(&mut y);
        }
        y
    }

    /// Accumulates parameter gradients; returns the input gradient when asked.
    pub fn backward(
        &self,
        y: &[T],
        grad: &mut [T],
        batch: usize,
        cache: &Cache<T>,
        dw: &mut [T],
        db: &mut [T],
        want_input: bool,
    ) -> Option<Vec<T>> {
        let (ck, p, o) = (self.patch(), self.positions(), self.output.channels);
        if self.relu {
            relu_mask(y, grad);
        }
        let mut dx = want_input.then(|| vec![T::ZERO; batch * self.input.len()]);
        let mut dcols = if want_input { vec![T::ZERO; ck * p] } else { Vec::new() };
        for b in 0..batch {
            let gb = &grad[b * o * p..][..o * p];
            let cb = &cache.cols[b * ck * p..][..ck * p];
            T::gemm(o, p, ck, T::ONE, gb, p as isize, 1, cb, 1, p as isize, T::ONE, dw, ck as isize, 1);
            for (f, row) in gb.chunks_exact(p).enumerate() {
                let mut s = T::ZERO;
                for &v in row {
                    s += v;
                }
                db[f] += s;
            }
            if let Some(dx) = dx.as_mut() {
                T::gemm(ck, o, p, T::ONE, &self.weight, 1, ck as isize, gb, p as isize, 1, T::ZERO, &mut dcols, p as isize, 1);
                self.col2im(&dcols, &mut dx[b * self.input.len()..][..self.input.len()]);
            }
        }
        dx
    }
}

impl Pool {
    pub fn forward<T: Real>(&self, x: &[T], batch: usize, cache: Option<&mut Cache<T>>) -> Vec<T> {
        let (ih, iw) = (self.input.height, self.input.width);
        let (oh, ow) = (self.output.height, self.output.width);
        let [sh, sw] = self.size;
        let channels = batch * self.input.channels;
        let mut y = vec![T::ZERO; channels * oh * ow];
        let mut argmax = Vec::new();
        let track = cache.is_some() && self.kind == PoolKind::Max;
        if track {
            argmax.resize(y.len(), 0u32);
        }
        let scale = T::from_f64(1.0 / (sh * sw) as f64);
        for c in 0..channels {
            let xc = &x[c * ih * iw..][..ih * iw];
            for py in 0..oh {
                for px in 0..ow {
                    let out = (c * oh + py) * ow + px;
                    match self.kind {
                        PoolKind::Max => {
                            let mut best = py * sh * iw + px * sw;
                            for dy in 0..sh {
                                for dx in 0..sw {
                                    let idx = (py * sh + dy) * iw + px * sw + dx;
                                    if xc[idx] > xc[best] {
                                        best = idx;
                                    }
                                }
                            }
                            y[out] = xc[best];
                            if track {
                                argmax[out] = best as u32;
                            }
                        }
                        PoolKind::Avg => {
                            let mut s = T::ZERO;
                            for dy in 0..sh {
                                for dx in 0..sw {
                                    s += xc[(py * sh + dy) * iw + px * sw + dx];
                                }
                            }
                            y[out] = s * scale;
                        }
                    }
                }
            }
        }
        if let Some(c) = cache {
            c.argmax = argmax;
        }
        y
    }

    pub fn backward<T: Real>(&self, grad: &[T], batch: usize, cache: &Cache<T>) -> Vec<T> {
        let (ih, iw) = (self.input.height, self.input.width);
        let (oh, ow) = (self.output.height, self.output.width);
        let [sh, sw] = self.size;
        let channels = batch * self.input.channels;
        let mut dx = vec![T::ZERO; channels * ih * iw];
        let scale = T::from_f64(1.0 / (sh * sw) as f64);
        for c in 0..channels {
            let dxc = &mut dx[c * ih * iw..][..ih * iw];
            for py in 0..oh {
                for px in 0..ow {
                    let out = (c * oh + py) * ow + px;
                    match self.kind {
                        PoolKind::Max => dxc[cache.argmax[out] as usize] += grad[out],
                        PoolKind::Avg => {
                            let g = grad[out] * scale;
                            for dy in 0..sh {
                                for dx in 0..sw {
                                    dxc[(py * sh + dy) * iw + px * sw + dx] += g;
                                }
                            }
                        }
                    }
                }
            }
        }
        dx
    }
}

impl<T: Real> Dense<T> {
    /// Pre-softmax logits for a softmax layer, activated output otherwise.
    pub fn forward(&self, x: &[T], batch: usize) -> Vec<T> {
        let (n_in, n_out) = (self.inputs, self.outputs);
        let mut y = Vec::with_capacity(batch * n_out);
        for _ in 0..batch {
            y.extend_from_slice(&self.bias);
        }
        T::gemm(batch, n_in, n_out, T::ONE, x, n_in as isize, 1, &self.weight, 1, n_in as isize, T::ONE, &mut y, n_out as isize, 1);
        if self.activation == Activation::Relu {
            relu_in_place(&mut y);
        }
        y
    }

    #[allow(clippy::too_many_arguments)]
    pub fn backward(
        &self,
        x: &[T],
        y: &[T],
        grad: &mut [T],
        batch: usize,
        dw: &mut [T],
        db: &mut [T],
        want_input: bool,
    ) -> Option<Vec<T>> {
        let (n_in, n_out) = (self.inputs, self.outputs);
        if self.activation == Activation::Relu {
            relu_mask(y, grad);
        }
        T::gemm(n_out, batch, n_in, T::ONE, grad, 1, n_out as isize, x, n_in as isize, 1, T::ONE, dw, n_in as isize, 1);
        for row in grad.chunks_exact(n_out) {
            for (d, g) in db.iter_mut().zip(row) {
                *d += *g;
            }
        }
        want_input.then(|| {
            let mut dx = vec![T::ZERO; batch * n_in];
            T::gemm(batch, n_out, n_in, T::ONE, grad, n_out as isize, 1, &self.weight, n_in as isize, 1, T::ZERO, &mut dx, n_in as isize, 1);
            dx
        })
    }
}

fn relu_in_place<T: Real>(v: &mut [T]) {
    for x in v {
        if *x < T::ZERO {
            *x = T::ZERO;
        }
    }
}

fn relu_mask<T: Real>(y: &[T], grad: &mut [T]) {
    for (g, &v) in grad.iter_mut().zip(y) {
        if !(v > T::ZERO) {
            *g = T::ZERO;
        }
    }
}

/// Row-wise softmax, numerically stabilised by the row maximum.
pub(crate) fn softmax_rows<T: Real>(logits: &mut [T], classes: usize) {
    for row in logits.chunks_exact_mut(classes) {
        let m = row.iter().copied().fold(row[0], T::max);
        let mut sum = T::ZERO;
        for v in row.iter_mut() {
            *v = (*v - m).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v = *v / sum;
        }
    }
}
