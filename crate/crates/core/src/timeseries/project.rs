use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ops::OpCount;
use crate::radar::FrameCube;
use crate::timeseries::SincFilter;

/// One complex value per chirp, indexed `[frame][rx][chirp]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFrameMatrix {
    values: Vec<Complex64>,
    frames: usize,
    channels: usize,
    chirps: usize,
}

impl ComplexFrameMatrix {
    pub fn new(frames: usize, channels: usize, chirps: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != frames * channels * chirps {
            return Err(Error::Parameter(format!(
                "{} values for {frames}x{channels}x{chirps}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Parameter("non-finite projection value".into()));
        }
        Ok(ComplexFrameMatrix {
            values,
            frames,
            channels,
            chirps,
        })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn chirps(&self) -> usize {
        self.chirps
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, f: usize, r: usize, n: usize) -> Complex64 {
        self.values[(f * self.channels + r) * self.chirps + n]
    }

    pub fn magnitude(&self, f: usize, r: usize, n: usize) -> f64 {
        self.get(f, r, n).norm()
    }

    pub fn phase(&self, f: usize, r: usize, n: usize) -> f64 {
        self.get(f, r, n).arg()
    }

    /// Multiplies every value by `rotation`.
    pub fn rotated(&self, rotation: Complex64) -> Self {
        ComplexFrameMatrix {
            values: self.values.iter().map(|v| v * rotation).collect(),
            ..self.clone()
        }
    }
}

/// Inner product of every chirp with the filter kernel:
/// `s[f, r, n] = sum_m x[f, r, n, m] h[M/2 - m]` (window folded into `h`).
pub fn project(cube: &FrameCube, filter: &SincFilter) -> Result<ComplexFrameMatrix> {
    project_counted(cube, filter, &mut OpCount::new())
}

pub fn project_counted(cube: &FrameCube, filter: &SincFilter, ops: &mut OpCount) -> Result<ComplexFrameMatrix> {
    if !cube.is_dc_removed() {
        return Err(Error::Parameter("projection needs a DC-removed cube".into()));
    }
    let (f, r, n, m) = cube.dims();
    if filter.len() != m {
        return Err(Error::Parameter(format!(
            "filter length {} does not match {m} samples per chirp",
            filter.len()
        )));
    }
    let kernel = filter.kernel();
    let values: Vec<Complex64> = cube
        .samples()
        .chunks_exact(m.max(1))
        .map(|chirp| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (x, h) in chirp.iter().zip(kernel) {
                re += x * h.re;
                im += x * h.im;
            }
            Complex64::new(re, im)
        })
        .collect();
    ops.real_complex_macs((f * r * n * m) as u64);
    ComplexFrameMatrix::new(f, r, n, values)
}
