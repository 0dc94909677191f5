use num_complex::Complex64;
use rayon::prelude::*;

use crate::conventional::fft::{fft_shift, hann, FftPlan};
use crate::error::{Error, Result};
use crate::ops::OpCount;
use crate::radar::{FrameCube, RadarConfig};

/// Complex range-Doppler map of one frame and receiver, `N x M/2`, Doppler
/// axis shifted so zero velocity sits at row `N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerImage {
    bins: Vec<Complex64>,
    doppler_bins: usize,
    range_bins: usize,
}

impl RangeDopplerImage {
    pub fn new(doppler_bins: usize, range_bins: usize, bins: Vec<Complex64>) -> Result<Self> {
        if bins.len() != doppler_bins * range_bins {
            return Err(Error::Shape(format!(
                "{} bins for a {doppler_bins}x{range_bins} image",
                bins.len()
            )));
        }
        Ok(RangeDopplerImage {
            bins,
            doppler_bins,
            range_bins,
        })
    }

    pub fn doppler_bins(&self) -> usize {
        self.doppler_bins
    }

    pub fn range_bins(&self) -> usize {
        self.range_bins
    }

    pub fn get(&self, doppler: usize, range: usize) -> Complex64 {
        self.bins[doppler * self.range_bins + range]
    }

    /// Row-major `[doppler][range]`.
    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    /// `(doppler, range)` of the largest magnitude; the first on ties.
    pub fn peak(&self) -> (usize, usize) {
        let mut best = (0, 0.0);
        for (i, v) in self.bins.iter().enumerate() {
            let m = v.norm_sqr();
            if m > best.1 {
                best = (i, m);
            }
        }
        (best.0 / self.range_bins, best.0 % self.range_bins)
    }
}

/// All maps of one recording, indexed `[frame][receiver]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RdiCube {
    config: RadarConfig,
    frames: usize,
    images: Vec<RangeDopplerImage>,
}

impl RdiCube {
    pub fn new(config: RadarConfig, frames: usize, images: Vec<RangeDopplerImage>) -> Result<Self> {
        if images.len() != frames * config.rx_count {
            return Err(Error::Shape(format!(
                "{} images for {frames} frames x {} receivers",
                images.len(),
                config.rx_count
            )));
        }
        Ok(RdiCube {
            config,
            frames,
            images,
        })
    }

    pub fn config(&self) -> &RadarConfig {
        &self.config
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn channels(&self) -> usize {
        self.config.rx_count
    }

    pub fn image(&self, frame: usize, rx: usize) -> &RangeDopplerImage {
        &self.images[frame * self.config.rx_count + rx]
    }

    pub fn doppler_bins(&self) -> usize {
        self.config.chirps_per_frame
    }

    pub fn range_bins(&self) -> usize {
        self.config.samples_per_chirp / 2
    }

    /// Magnitude summed over receivers for one frame, `[doppler][range]`.
    pub fn integrated_magnitude(&self, frame: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.doppler_bins() * self.range_bins()];
        for r in 0..self.channels() {
            for (o, v) in out.iter_mut().zip(self.image(frame, r).bins()) {
                *o += v.norm();
            }
        }
        out
    }
}

pub fn range_doppler(cube: &FrameCube) -> Result<RdiCube> {
    range_doppler_counted(cube, &mut OpCount::new())
}

/// Hann-windowed FFT over fast time (positive half kept), then Hann-windowed
/// FFT over slow time with the zero bin moved to the centre.
pub fn range_doppler_counted(cube: &FrameCube, ops: &mut OpCount) -> Result<RdiCube> {
    if !cube.is_dc_removed() {
        return Err(Error::Config("range-Doppler processing needs a DC-removed cube".into()));
    }
    let (frames, rx, n, m) = cube.dims();
    let range_plan = FftPlan::new(m)?;
    let doppler_plan = FftPlan::new(n)?;
    let win_m = hann(m);
    let win_n = hann(n);
    let half = m / 2;

    let images: Vec<(RangeDopplerImage, OpCount)> = (0..frames * rx)
        .into_par_iter()
        .map(|i| {
            let (f, r) = (i / rx, i % rx);
            let mut local = OpCount::new();
            let mut bins = vec![Complex64::new(0.0, 0.0); n * half];
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for ni in 0..n {
                for (b, (x, w)) in buf.iter_mut().zip(cube.chirp(f, r, ni).iter().zip(&win_m)) {
                    *b = Complex64::new(x * w, 0.0);
                }
                range_plan.forward(&mut buf, &mut local);
                bins[ni * half..(ni + 1) * half].copy_from_slice(&buf[..half]);
            }
            local.muls += (n * m) as u64;
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for mi in 0..half {
                for ni in 0..n {
                    col[ni] = bins[ni * half + mi] * win_n[ni];
                }
                doppler_plan.forward(&mut col, &mut local);
                fft_shift(&mut col);
                for ni in 0..n {
                    bins[ni * half + mi] = col[ni];
                }
            }
            local.muls += (2 * n * half) as u64;
            (RangeDopplerImage::new(n, half, bins).expect("shape"), local)
        })
        .collect();

    let mut out = Vec::with_capacity(images.len());
    for (img, local) in images {
        *ops += local;
        out.push(img);
    }
    RdiCube::new(cube.config().clone(), frames, out)
}

/// Per frame, the range profile (sum of `|RDI|` over Doppler) and the Doppler
/// profile (sum over range), both summed over receivers. Returned row-major
/// as `F x M/2` and `F x N`.
pub fn marginalize(rdi: &RdiCube) -> (Vec<f64>, Vec<f64>) {
    marginalize_counted(rdi, &mut OpCount::new())
}

pub fn marginalize_counted(rdi: &RdiCube, ops: &mut OpCount) -> (Vec<f64>, Vec<f64>) {
    let (nd, nr) = (rdi.doppler_bins(), rdi.range_bins());
    let mut range = vec![0.0; rdi.frames() * nr];
    let mut doppler = vec![0.0; rdi.frames() * nd];
    for f in 0..rdi.frames() {
        for r in 0..rdi.channels() {
            let img = rdi.image(f, r);
            for d in 0..nd {
                for k in 0..nr {
                    let v = img.get(d, k).norm();
                    range[f * nr + k] += v;
                    doppler[f * nd + d] += v;
                }
            }
        }
    }
    let cells = (rdi.frames() * rdi.channels() * nd * nr) as u64;
    ops.muls += 2 * cells;
    ops.adds += 3 * cells;
    ops.transcendentals += cells;
    (range, doppler)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn config(rx: usize, n: usize, m: usize) -> RadarConfig {
        RadarConfig {
            rx_count: rx,
            chirps_per_frame: n,
            samples_per_chirp: m,
            antenna_positions: vec![[0.0, 0.0]; rx],
            ..RadarConfig::default()
        }
    }

    fn image(nd: usize, nr: usize, f: impl Fn(usize, usize) -> Complex64) -> RangeDopplerImage {
        let bins = (0..nd * nr).map(|i| f(i / nr, i % nr)).collect();
        RangeDopplerImage::new(nd, nr, bins).unwrap()
    }

    #[test]
    fn zero_cube_zero_rdi() {
        let cube = FrameCube::zeros(RadarConfig::default(), 2).unwrap().remove_dc().unwrap();
        let rdi = range_doppler(&cube).unwrap();
        for f in 0..2 {
            for r in 0..3 {
                assert!(rdi.image(f, r).bins().iter().all(|v| v.norm() == 0.0));
            }
        }
    }

    #[test]
    fn needs_dc_removal_and_power_of_two() {
        let cube = FrameCube::zeros(RadarConfig::default(), 1).unwrap();
        assert!(range_doppler(&cube).is_err());
        let odd = FrameCube::zeros(config(1, 12, 64), 1).unwrap().remove_dc().unwrap();
        assert!(matches!(range_doppler(&odd), Err(Error::Config(_))));
    }

    #[test]
    fn tone_lands_in_expected_cell() {
        // fast-time bin 5, slow-time phase step of 3 bins
        let c = config(1, 16, 32);
        let cube = FrameCube::from_fn(c, 1, |_, _, n, m| {
            (2.0 * PI * (5.0 * m as f64 / 32.0) + 2.0 * PI * 3.0 * n as f64 / 16.0).cos()
        })
        .unwrap()
        .remove_dc()
        .unwrap();
        let rdi = range_doppler(&cube).unwrap();
        assert_eq!(rdi.image(0, 0).peak(), (8 + 3, 5));
    }

    #[test]
    fn single_cell_marginals() {
        let c = config(2, 4, 8);
        let img = image(4, 4, |d, k| if (d, k) == (1, 2) { Complex64::new(3.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        let rdi = RdiCube::new(c, 1, vec![img.clone(), img]).unwrap();
        let (range, doppler) = marginalize(&rdi);
        assert_eq!(range, vec![0.0, 0.0, 6.0, 0.0]);
        assert_eq!(doppler, vec![0.0, 6.0, 0.0, 0.0]);
    }

    #[test]
    fn uniform_marginals() {
        let c = config(1, 32, 64);
        let img = image(32, 32, |_, _| Complex64::new(1.0, 0.0));
        let (range, doppler) = marginalize(&RdiCube::new(c, 1, vec![img]).unwrap());
        assert!(range.iter().chain(&doppler).all(|&v| v == 32.0));
    }

    #[test]
    fn scales_linearly() {
        let c = config(2, 8, 16);
        let cube = FrameCube::from_fn(c, 2, |f, r, n, m| ((f + 3 * r + 7 * n + 11 * m) as f64).sin())
            .unwrap()
            .remove_dc()
            .unwrap();
        let scaled = cube.linear_combination(2.5, &cube, 0.0).unwrap();
        let a = range_doppler(&cube).unwrap();
        let b = range_doppler(&scaled).unwrap();
        for f in 0..2 {
            for r in 0..2 {
                for (x, y) in a.image(f, r).bins().iter().zip(b.image(f, r).bins()) {
                    assert!((x * 2.5 - y).norm() < 1e-9);
                }
            }
        }
    }
}
