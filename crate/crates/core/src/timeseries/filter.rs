use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Window {
    Rectangular,
    Hann,
}

impl Window {
    /// Taper value at tap `m` of a filter spanning `[-len/2, len/2]`.
    fn at(self, m: i64, len: usize) -> f64 {
        match self {
            Window::Rectangular => 1.0,
            Window::Hann => 0.5 * (1.0 + (2.0 * PI * m as f64 / len as f64).cos()),
        }
    }
}

/// Complex band-pass `h[m] = b sinc(b m) exp(j 2 pi f_c m) w[m]`.
///
/// `b` is the full passband width, so the passband is
/// `[f_c - b/2, f_c + b/2]`; with the defaults (`f_c = 0.25`, `b = 0.5`) that
/// is exactly the positive half of the spectrum and the filter extracts the
/// analytic signal of a real chirp.
#[derive(Debug, Clone, PartialEq)]
pub struct SincFilter {
    len: usize,
    center: f64,
    bandwidth: f64,
    window: Window,
    /// Taps for `m` in `[-len/2, len/2]`, window applied.
    taps: Vec<Complex64>,
    /// `kernel[i] = h[len/2 - i]`: the taps laid out against fast-time samples.
    kernel: Vec<Complex64>,
}

impl SincFilter {
    pub fn new(len: usize, center: f64, bandwidth: f64, window: Window) -> Result<Self> {
        if len == 0 {
            return Err(Error::Parameter("filter length must be >= 1".into()));
        }
        if !(bandwidth > 0.0 && bandwidth <= 1.0) {
            return Err(Error::Parameter(format!("bandwidth {bandwidth} outside (0, 1]")));
        }
        if !(center.abs() < 0.5) {
            return Err(Error::Parameter(format!("center {center} outside (-0.5, 0.5)")));
        }
        let half = (len / 2) as i64;
        let taps: Vec<Complex64> = (-half..=half)
            .map(|m| {
                let mf = m as f64;
                let amp = bandwidth * sinc(bandwidth * mf) * window.at(m, len);
                Complex64::from_polar(1.0, 2.0 * PI * center * mf) * amp
            })
            .collect();
        let kernel = (0..len).map(|i| taps[(2 * half - i as i64) as usize]).collect();
        Ok(SincFilter {
            len,
            center,
            bandwidth,
            window,
            taps,
            kernel,
        })
    }

    /// The default analytic-signal filter for chirps of `len` samples.
    pub fn analytic(len: usize) -> Result<Self> {
        Self::new(len, 0.25, 0.5, Window::Hann)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Tap at offset `m` from the filter center.
    pub fn coefficient(&self, m: i64) -> Option<Complex64> {
        let half = (self.len / 2) as i64;
        if m.abs() > half {
            return None;
        }
        Some(self.taps[(m + half) as usize])
    }

    pub fn taps(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let half = (self.len / 2) as i64;
        self.taps.iter().enumerate().map(move |(i, &h)| (i as i64 - half, h))
    }

    /// Weights applied to fast-time samples `0..len`; sample `len/2` meets tap 0.
    pub fn kernel(&self) -> &[Complex64] {
        &self.kernel
    }

    /// Fast-time index that the output phase refers to.
    pub fn reference_index(&self) -> usize {
        self.len / 2
    }
}

/// Normalized sinc, `sin(pi x) / (pi x)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense direct evaluation of `sum_m h[m] exp(-j 2 pi f m)`.
    fn response(filter: &SincFilter, f: f64) -> f64 {
        filter
            .taps()
            .map(|(m, h)| h * Complex64::from_polar(1.0, -2.0 * PI * f * m as f64))
            .sum::<Complex64>()
            .norm()
    }

    #[test]
    fn center_tap() {
        let h = SincFilter::new(64, 0.25, 0.5, Window::Rectangular).unwrap();
        let h0 = h.coefficient(0).unwrap();
        assert!((h0.re - 0.5).abs() < 1e-15 && h0.im.abs() < 1e-15);
    }

    #[test]
    fn first_tap() {
        // b sinc(b) exp(j pi/2) with b = 0.5: 0.5 * (2/pi) * j = j/pi
        let h = SincFilter::new(64, 0.25, 0.5, Window::Rectangular).unwrap();
        let h1 = h.coefficient(1).unwrap();
        assert!(h1.re.abs() < 1e-15);
        assert!((h1.im - 1.0 / PI).abs() < 1e-15);
        // sinc zero crossing: m = 2 -> sinc(1) = 0
        assert!(h.coefficient(2).unwrap().norm() < 1e-15);
    }

    #[test]
    fn stopband_attenuation() {
        let h = SincFilter::analytic(64).unwrap();
        let pass = response(&h, 0.25);
        let stop = response(&h, -0.2);
        assert!((pass - 1.0).abs() < 1e-3, "passband gain {pass}");
        let db = 20.0 * (stop / pass).log10();
        assert!(db <= -40.0, "{db} dB");
        // the whole negative half away from the two band edges is deep
        let worst = (0..=60)
            .map(|i| -0.45 + 0.4 * i as f64 / 60.0)
            .map(|f| response(&h, f))
            .fold(0.0, f64::max);
        assert!(20.0 * (worst / pass).log10() < -40.0);
    }

    #[test]
    fn kernel_alignment() {
        let h = SincFilter::analytic(64).unwrap();
        assert_eq!(h.kernel().len(), 64);
        assert_eq!(h.kernel()[32], h.coefficient(0).unwrap());
        assert_eq!(h.kernel()[0], h.coefficient(32).unwrap());
        assert_eq!(h.kernel()[63], h.coefficient(-31).unwrap());
        let odd = SincFilter::analytic(7).unwrap();
        assert_eq!(odd.taps().count(), 7);
        assert_eq!(odd.kernel()[6], odd.coefficient(-3).unwrap());
    }

    #[test]
    fn invalid_parameters() {
        assert!(SincFilter::new(64, 0.25, 0.0, Window::Hann).is_err());
        assert!(SincFilter::new(64, 0.25, 1.5, Window::Hann).is_err());
        assert!(SincFilter::new(64, 0.5, 0.5, Window::Hann).is_err());
        assert!(SincFilter::new(0, 0.25, 0.5, Window::Hann).is_err());
    }
}
