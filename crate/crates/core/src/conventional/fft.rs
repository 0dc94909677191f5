//! Iterative radix-2 FFT.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ops::OpCount;

/// Precomputed twiddles and bit-reversal table for one power-of-two size.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    twiddles: Vec<Complex64>,
    reversed: Vec<usize>,
}

impl FftPlan {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Config(format!("FFT length {len} is not a power of two")));
        }
        let bits = len.trailing_zeros();
        let reversed = (0..len)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        let twiddles = (0..len / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        Ok(FftPlan {
            len,
            twiddles,
            reversed,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Butterflies executed by one transform, `len/2 * log2(len)`.
    pub fn butterflies(&self) -> u64 {
        (self.len / 2) as u64 * self.len.trailing_zeros() as u64
    }

    /// Forward transform `X[k] = sum_n x[n] e^{-j 2 pi k n / len}`, in place.
    pub fn forward(&self, buf: &mut [Complex64], ops: &mut OpCount) {
        assert_eq!(buf.len(), self.len, "buffer does not match plan length");
        for i in 0..self.len {
            let j = self.reversed[i];
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < self.len {
            let stride = self.len / (2 * half);
            for start in (0..self.len).step_by(2 * half) {
                for k in 0..half {
                    let t = self.twiddles[k * stride] * buf[start + k + half];
                    let u = buf[start + k];
                    buf[start + k] = u + t;
                    buf[start + k + half] = u - t;
                }
            }
            half *= 2;
        }
        // one complex multiply and two complex adds per butterfly
        let b = self.butterflies();
        ops.complex_macs += b;
        ops.muls += 4 * b;
        ops.adds += 6 * b;
    }
}

/// Moves the zero-frequency bin to index `len / 2`.
pub fn fft_shift<T: Copy>(buf: &mut [T]) {
    let half = buf.len() / 2;
    buf.rotate_left(buf.len() - half);
}

/// Periodic Hann window, `0.5 (1 - cos(2 pi n / len))`.
pub fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(i, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * i) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(FftPlan::new(12), Err(Error::Config(_))));
        assert!(FftPlan::new(0).is_err());
        assert!(FftPlan::new(1).is_ok());
    }

    #[test]
    fn impulse_and_constant() {
        let plan = FftPlan::new(8).unwrap();
        let mut x = vec![Complex64::new(0.0, 0.0); 8];
        x[0] = Complex64::new(1.0, 0.0);
        plan.forward(&mut x, &mut OpCount::new());
        assert!(x.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let mut c = vec![Complex64::new(1.0, 0.0); 8];
        plan.forward(&mut c, &mut OpCount::new());
        assert!((c[0].re - 8.0).abs() < 1e-12);
        assert!(c[1..].iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn shift_centers_dc() {
        let mut v = [0, 1, 2, 3, 4, 5, 6, 7];
        fft_shift(&mut v);
        assert_eq!(v, [4, 5, 6, 7, 0, 1, 2, 3]);
    }

    #[test]
    fn counts_butterflies() {
        let plan = FftPlan::new(64).unwrap();
        let mut ops = OpCount::new();
        plan.forward(&mut vec![Complex64::new(0.0, 0.0); 64], &mut ops);
        assert_eq!(ops.complex_macs, 32 * 6);
    }

    proptest! {
        #[test]
        fn matches_naive_dft(log in 0u32..8, seed in proptest::collection::vec(-1.0f64..1.0, 256)) {
            let n = 1usize << log;
            let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(seed[2 * i % 256], seed[(2 * i + 1) % 256])).collect();
            let mut y = x.clone();
            FftPlan::new(n).unwrap().forward(&mut y, &mut OpCount::new());
            for (a, b) in y.iter().zip(naive(&x)) {
                prop_assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()));
            }
        }
    }
}
