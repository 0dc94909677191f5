use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::OpCount;
use crate::radar::FrameCube;
use crate::timeseries::{project_counted, ComplexFrameMatrix, SincFilter, Window};

/// The four per-chirp signals of one recording, each of length `F * N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesFeatures {
    /// Accumulated slow-time phase (rad); see [`TimeSeriesFeatures::rel_range_meters`].
    pub rel_range: Vec<f64>,
    /// Accumulated phase difference of the azimuth pair (rad).
    pub azimuth_acc: Vec<f64>,
    /// Accumulated phase difference of the elevation pair (rad).
    pub elevation_acc: Vec<f64>,
    /// Receiver-summed magnitude.
    pub magnitude: Vec<f64>,
    /// Nominal spacing between samples (s).
    pub sample_period: f64,
}

impl TimeSeriesFeatures {
    pub fn len(&self) -> usize {
        self.magnitude.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitude.is_empty()
    }

    /// Relative range in metres, `lambda / (4 pi)` times the phase.
    pub fn rel_range_meters(&self, wavelength: f64) -> Vec<f64> {
        let scale = wavelength / (4.0 * std::f64::consts::PI);
        self.rel_range.iter().map(|p| p * scale).collect()
    }

    /// Channels in network input order: rel_range, azimuth, elevation, magnitude.
    pub fn channels(&self) -> [&[f64]; 4] {
        [
            &self.rel_range,
            &self.azimuth_acc,
            &self.elevation_acc,
            &self.magnitude,
        ]
    }
}

/// Filter and antenna pairs used by [`extract_features`]. Pairs are 0-based
/// receiver indices; the defaults are antennas (1, 3) and (2, 3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub center: f64,
    pub bandwidth: f64,
    pub window: Window,
    pub azimuth_pair: (usize, usize),
    pub elevation_pair: (usize, usize),
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            center: 0.25,
            bandwidth: 0.5,
            window: Window::Hann,
            azimuth_pair: (0, 2),
            elevation_pair: (1, 2),
        }
    }
}

/// `m[k] = sum_r |s[f, r, n]|`, `k = f N + n`.
pub fn magnitude_track(matrix: &ComplexFrameMatrix) -> Vec<f64> {
    magnitude_counted(matrix, &mut OpCount::new())
}

fn magnitude_counted(matrix: &ComplexFrameMatrix, ops: &mut OpCount) -> Vec<f64> {
    let (f, r, n) = (matrix.frames(), matrix.channels(), matrix.chirps());
    let mut out = vec![0.0; f * n];
    for fi in 0..f {
        for ri in 0..r {
            for ni in 0..n {
                out[fi * n + ni] += matrix.magnitude(fi, ri, ni);
            }
        }
    }
    let cells = (f * r * n) as u64;
    ops.muls += 2 * cells;
    ops.adds += 2 * cells;
    ops.transcendentals += cells;
    out
}

/// Running sum of the wrapped phase difference between receivers `pair.0`
/// and `pair.1`, starting at zero: `aoa[k] = sum_{i < k} dphi[i]`.
pub fn accumulated_aoa(matrix: &ComplexFrameMatrix, pair: (usize, usize)) -> Result<Vec<f64>> {
    aoa_counted(matrix, pair, &mut OpCount::new())
}

fn aoa_counted(matrix: &ComplexFrameMatrix, (r0, r1): (usize, usize), ops: &mut OpCount) -> Result<Vec<f64>> {
    let r = matrix.channels();
    if r0 == r1 || r0 >= r || r1 >= r {
        return Err(Error::Parameter(format!(
            "invalid antenna pair ({r0}, {r1}) for {r} channels"
        )));
    }
    let (f, n) = (matrix.frames(), matrix.chirps());
    let mut out = Vec::with_capacity(f * n);
    let mut acc = 0.0;
    for fi in 0..f {
        for ni in 0..n {
            out.push(acc);
            let diff = matrix.get(fi, r0, ni) * matrix.get(fi, r1, ni).conj();
            acc += diff.arg();
        }
    }
    let cells = (f * n) as u64;
    ops.complex_muls(cells);
    ops.transcendentals += cells;
    ops.adds += cells;
    Ok(out)
}

/// Slow-time phase accumulated over the recording without crossing frame
/// boundaries.
///
/// Within each frame and receiver, `d[n] = arg(s[n+1] conj(s[n]))`. Between
/// frames `f` and `f+1` the unknown step is replaced by the midpoint of the
/// last step of `f` and the first step of `f+1`. The `F N - 1` steps are
/// averaged over receivers and summed from zero.
pub fn relative_range(matrix: &ComplexFrameMatrix) -> Result<Vec<f64>> {
    relative_range_counted(matrix, &mut OpCount::new())
}

fn relative_range_counted(matrix: &ComplexFrameMatrix, ops: &mut OpCount) -> Result<Vec<f64>> {
    let (f, r, n) = (matrix.frames(), matrix.channels(), matrix.chirps());
    if n < 2 {
        return Err(Error::Unsupported(format!(
            "relative range needs at least 2 chirps per frame, got {n}"
        )));
    }
    if f == 0 {
        return Ok(Vec::new());
    }
    let steps_len = f * n - 1;
    let mut steps = vec![0.0; steps_len];
    let mut frame_steps = vec![0.0; n - 1];
    for ri in 0..r {
        let mut prev_last: Option<f64> = None;
        for fi in 0..f {
            for ni in 0..n - 1 {
                frame_steps[ni] = (matrix.get(fi, ri, ni + 1) * matrix.get(fi, ri, ni).conj()).arg();
            }
            // frame fi occupies steps [fi N, fi N + N - 2]; the bridge sits just before it
            let base = fi * n;
            if let Some(last) = prev_last {
                steps[base - 1] += 0.5 * (last + frame_steps[0]);
            }
            for (ni, d) in frame_steps.iter().enumerate() {
                steps[base + ni] += d;
            }
            prev_last = frame_steps.last().copied();
        }
    }
    let inv = 1.0 / r as f64;
    let mut out = Vec::with_capacity(f * n);
    let mut acc = 0.0;
    out.push(0.0);
    for s in &steps {
        acc += s * inv;
        out.push(acc);
    }
    let diffs = (f * r * (n - 1)) as u64;
    let bridges = (r * (f - 1)) as u64;
    ops.complex_muls(diffs);
    ops.transcendentals += diffs;
    ops.adds += diffs + 2 * bridges + 2 * steps_len as u64;
    ops.muls += bridges + steps_len as u64;
    Ok(out)
}

/// Full reduction of a recording: DC removal (when needed), projection with
/// the default analytic filter, then the four signals.
pub fn extract_features(cube: &FrameCube) -> Result<TimeSeriesFeatures> {
    extract_features_counted(cube, &FeatureConfig::default(), &mut OpCount::new())
}

pub fn extract_features_counted(
    cube: &FrameCube,
    config: &FeatureConfig,
    ops: &mut OpCount,
) -> Result<TimeSeriesFeatures> {
    let owned;
    let cube = if cube.is_dc_removed() {
        cube
    } else {
        owned = cube.remove_dc_counted(ops)?;
        &owned
    };
    let filter = SincFilter::new(cube.samples_per_chirp(), config.center, config.bandwidth, config.window)?;
    let matrix = project_counted(cube, &filter, ops)?;
    Ok(TimeSeriesFeatures {
        rel_range: relative_range_counted(&matrix, ops)?,
        azimuth_acc: aoa_counted(&matrix, config.azimuth_pair, ops)?,
        elevation_acc: aoa_counted(&matrix, config.elevation_pair, ops)?,
        magnitude: magnitude_counted(&matrix, ops),
        sample_period: cube.config().t_prt,
    })
}

/// Phase steps of the plain concatenated sequence, including the raw
/// frame-boundary step. Reference for tests and benchmarks only.
#[doc(hidden)]
pub fn naive_concatenated_range(matrix: &ComplexFrameMatrix) -> Vec<f64> {
    let (f, r, n) = (matrix.frames(), matrix.channels(), matrix.chirps());
    let k = f * n;
    let mut out = vec![0.0; k];
    for ri in 0..r {
        let mut acc = 0.0;
        for i in 1..k {
            let a = matrix.get((i - 1) / n, ri, (i - 1) % n);
            let b = matrix.get(i / n, ri, i % n);
            acc += (b * a.conj()).arg();
            out[i] += acc / r as f64;
        }
    }
    out
}
