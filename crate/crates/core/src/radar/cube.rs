use crate::error::{Error, Result};
use crate::ops::OpCount;
use crate::radar::RadarConfig;

/// Raw real-valued radar samples indexed `[frame][rx][chirp][sample]`.
///
/// Samples are held as `f64` in memory; the on-disk recording stores `f32`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCube {
    samples: Vec<f64>,
    frames: usize,
    config: RadarConfig,
    dc_removed: bool,
}

impl FrameCube {
    pub fn new(config: RadarConfig, frames: usize, samples: Vec<f64>) -> Result<Self> {
        config.validate()?;
        let expected = frame_len(&config)
            .checked_mul(frames)
            .ok_or_else(|| Error::Config("cube size overflows".into()))?;
        if samples.len() != expected {
            return Err(Error::Config(format!(
                "{} samples do not match {}x{}x{}x{}",
                samples.len(),
                frames,
                config.rx_count,
                config.chirps_per_frame,
                config.samples_per_chirp
            )));
        }
        Ok(FrameCube {
            samples,
            frames,
            config,
            dc_removed: false,
        })
    }

    pub fn zeros(config: RadarConfig, frames: usize) -> Result<Self> {
        let len = frame_len(&config) * frames;
        Self::new(config, frames, vec![0.0; len])
    }

    pub fn from_fn(
        config: RadarConfig,
        frames: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let (r, n, m) = (
            config.rx_count,
            config.chirps_per_frame,
            config.samples_per_chirp,
        );
        let mut samples = Vec::with_capacity(frames * r * n * m);
        for fi in 0..frames {
            for ri in 0..r {
                for ni in 0..n {
                    for mi in 0..m {
                        samples.push(f(fi, ri, ni, mi));
                    }
                }
            }
        }
        Self::new(config, frames, samples)
    }

    pub fn config(&self) -> &RadarConfig {
        &self.config
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn rx_count(&self) -> usize {
        self.config.rx_count
    }

    pub fn chirps(&self) -> usize {
        self.config.chirps_per_frame
    }

    pub fn samples_per_chirp(&self) -> usize {
        self.config.samples_per_chirp
    }

    /// `(F, R, N, M)`
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (
            self.frames,
            self.config.rx_count,
            self.config.chirps_per_frame,
            self.config.samples_per_chirp,
        )
    }

    pub fn is_dc_removed(&self) -> bool {
        self.dc_removed
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn get(&self, f: usize, r: usize, n: usize, m: usize) -> f64 {
        self.samples[self.index(f, r, n, m)]
    }

    pub fn index(&self, f: usize, r: usize, n: usize, m: usize) -> usize {
        let (_, rc, nc, mc) = self.dims();
        ((f * rc + r) * nc + n) * mc + m
    }

    /// Fast-time samples of one chirp.
    pub fn chirp(&self, f: usize, r: usize, n: usize) -> &[f64] {
        let m = self.samples_per_chirp();
        let start = self.index(f, r, n, 0);
        &self.samples[start..start + m]
    }

    /// The `N x M` block of one frame and receiver.
    pub fn block(&self, f: usize, r: usize) -> &[f64] {
        let len = self.chirps() * self.samples_per_chirp();
        let start = self.index(f, r, 0, 0);
        &self.samples[start..start + len]
    }

    /// Round every sample to the nearest `f32`, as the recording format stores it.
    pub fn quantized_f32(mut self) -> Self {
        for s in &mut self.samples {
            *s = *s as f32 as f64;
        }
        self
    }

    /// Element-wise `a * self + b * other`; both cubes must share dimensions.
    pub fn linear_combination(&self, a: f64, other: &FrameCube, b: f64) -> Result<FrameCube> {
        if self.dims() != other.dims() {
            return Err(Error::Config("cube dimensions differ".into()));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| a * x + b * y)
            .collect();
        let mut out = FrameCube::new(self.config.clone(), self.frames, samples)?;
        out.dc_removed = self.dc_removed && other.dc_removed;
        Ok(out)
    }

    /// Removes the per-chirp fast-time mean, then the per-sample slow-time mean,
    /// independently for every frame and receiver.
    pub fn remove_dc(&self) -> Result<FrameCube> {
        self.remove_dc_counted(&mut OpCount::new())
    }

    pub fn remove_dc_counted(&self, ops: &mut OpCount) -> Result<FrameCube> {
        if self.dc_removed {
            return Err(Error::Config("cube is already DC-removed".into()));
        }
        let (f, r, n, m) = self.dims();
        if self.samples.len() != f * r * n * m {
            return Err(Error::Config("sample buffer does not match dimensions".into()));
        }
        let mut out = self.clone();
        if n * m > 0 {
            for block in out.samples.chunks_exact_mut(n * m) {
                subtract_means(block, n, m);
            }
        }
        let total = (f * r * n * m) as u64;
        // two passes, each one accumulate and one subtract per sample
        ops.adds += 4 * total;
        ops.muls += (f * r * (n + m)) as u64;
        out.dc_removed = true;
        Ok(out)
    }

    #[cfg(test)]
    pub(crate) fn mark_dc_removed(mut self) -> Self {
        self.dc_removed = true;
        self
    }
}

/// Mean subtraction on one row-major `chirps x samples` block: every row is
/// made zero-mean first, then every column.
pub fn subtract_means(block: &mut [f64], chirps: usize, samples: usize) {
    debug_assert_eq!(block.len(), chirps * samples);
    for row in block.chunks_exact_mut(samples) {
        let mean = row.iter().sum::<f64>() / samples as f64;
        row.iter_mut().for_each(|v| *v -= mean);
    }
    let mut col_mean = vec![0.0; samples];
    for row in block.chunks_exact(samples) {
        for (acc, v) in col_mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    col_mean.iter_mut().for_each(|v| *v /= chirps as f64);
    for row in block.chunks_exact_mut(samples) {
        for (v, mean) in row.iter_mut().zip(&col_mean) {
            *v -= mean;
        }
    }
}

fn frame_len(config: &RadarConfig) -> usize {
    config.rx_count * config.chirps_per_frame * config.samples_per_chirp
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn small_config(r: usize, n: usize, m: usize) -> RadarConfig {
        RadarConfig {
            rx_count: r,
            chirps_per_frame: n,
            samples_per_chirp: m,
            antenna_positions: vec![[0.0, 0.0]; r],
            ..RadarConfig::default()
        }
    }

    #[test]
    fn zero_cube_stays_zero() {
        let cube = FrameCube::zeros(RadarConfig::default(), 2).unwrap();
        let out = cube.remove_dc().unwrap();
        assert!(out.is_dc_removed());
        assert!(out.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_is_pure_dc() {
        let cube = FrameCube::from_fn(RadarConfig::default(), 1, |_, _, _, _| 3.25).unwrap();
        let out = cube.remove_dc().unwrap();
        assert!(out.samples().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn sinusoid_survives_constant_removed() {
        // One frame, one channel; the sinusoid alternates sign from chirp to
        // chirp and has a whole number of cycles over the chirp.
        let (n, m) = (8, 40);
        let config = small_config(1, n, m);
        let tone = |mi: usize| (2.0 * PI * 0.1 * mi as f64).sin();
        let sign = |ni: usize| if ni % 2 == 0 { 1.0 } else { -1.0 };
        let cube = FrameCube::from_fn(config, 1, |_, _, ni, mi| 5.0 + sign(ni) * tone(mi) + ni as f64).unwrap();
        let out = cube.remove_dc().unwrap();

        // hand-rolled oracle: row means, then column means
        let mut expected = vec![vec![0.0; m]; n];
        for ni in 0..n {
            let row: Vec<f64> = (0..m).map(|mi| 5.0 + sign(ni) * tone(mi) + ni as f64).collect();
            let mean: f64 = row.iter().sum::<f64>() / m as f64;
            for mi in 0..m {
                expected[ni][mi] = row[mi] - mean;
            }
        }
        for mi in 0..m {
            let mean: f64 = (0..n).map(|ni| expected[ni][mi]).sum::<f64>() / n as f64;
            for ni in 0..n {
                expected[ni][mi] -= mean;
            }
        }
        for ni in 0..n {
            for mi in 0..m {
                let got = out.get(0, 0, ni, mi);
                assert!((got - expected[ni][mi]).abs() < 1e-12);
                // 4 full cycles per chirp and an even chirp count: both means vanish
                assert!((got - sign(ni) * tone(mi)).abs() < 1e-9, "{got} vs {}", tone(mi));
            }
        }
    }

    #[test]
    fn second_removal_is_rejected() {
        let cube = FrameCube::zeros(RadarConfig::default(), 1).unwrap();
        let once = cube.remove_dc().unwrap();
        assert!(matches!(once.remove_dc(), Err(Error::Config(_))));
    }

    #[test]
    fn dimension_mismatch_is_config_error() {
        let err = FrameCube::new(RadarConfig::default(), 1, vec![0.0; 10]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    fn rms(block: &[f64]) -> f64 {
        (block.iter().map(|v| v * v).sum::<f64>() / block.len() as f64).sqrt()
    }

    fn cube_strategy() -> impl Strategy<Value = FrameCube> {
        (1usize..3, 1usize..4, 2usize..9, 2usize..17).prop_flat_map(|(f, r, n, m)| {
            prop::collection::vec(-100.0f64..100.0, f * r * n * m).prop_map(move |s| {
                FrameCube::new(small_config(r, n, m), f, s).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn zero_mean_invariant(cube in cube_strategy()) {
            let out = cube.remove_dc().unwrap();
            let (f, r, n, m) = out.dims();
            for fi in 0..f {
                for ri in 0..r {
                    let block = out.block(fi, ri);
                    let tol = 1e-6 * rms(cube.block(fi, ri)).max(1e-300);
                    for ni in 0..n {
                        let mean = block[ni * m..(ni + 1) * m].iter().sum::<f64>() / m as f64;
                        prop_assert!(mean.abs() <= tol);
                    }
                    for mi in 0..m {
                        let mean = (0..n).map(|ni| block[ni * m + mi]).sum::<f64>() / n as f64;
                        prop_assert!(mean.abs() <= tol);
                    }
                }
            }
        }

        #[test]
        fn idempotent(cube in cube_strategy()) {
            let once = cube.remove_dc().unwrap();
            let (_, _, n, m) = once.dims();
            let mut twice = once.samples().to_vec();
            for block in twice.chunks_exact_mut(n * m) {
                subtract_means(block, n, m);
            }
            let scale = once.samples().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
            for (a, b) in once.samples().iter().zip(&twice) {
                prop_assert!((a - b).abs() <= 1e-9 * scale);
            }
        }

        #[test]
        fn linear(x in cube_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0, seed in any::<u64>()) {
            let y_samples: Vec<f64> = (0..x.samples().len())
                .map(|i| ((i as u64).wrapping_mul(seed | 1) % 1000) as f64 - 500.0)
                .collect();
            let (f, _, _, _) = x.dims();
            let y = FrameCube::new(x.config().clone(), f, y_samples).unwrap();
            let lhs = x.linear_combination(a, &y, b).unwrap().remove_dc().unwrap();
            let rhs = x.remove_dc().unwrap().linear_combination(a, &y.remove_dc().unwrap(), b).unwrap();
            for (l, r) in lhs.samples().iter().zip(rhs.samples()) {
                prop_assert!((l - r).abs() <= 1e-9 * (1.0 + l.abs()));
            }
        }
    }
}
