use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radar::{FrameCube, RadarConfig};
use crate::scene::trajectory::{dist, norm, Trajectory};

/// Range of the static clutter reflector (m).
const CLUTTER_RANGE: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimNoise {
    /// Standard deviation of additive white Gaussian noise per sample.
    pub thermal_std: f64,
    /// Amplitude of static clutter: a DC leakage offset plus a fixed reflector.
    pub clutter_amplitude: f64,
    /// Apply one uniform random carrier phase per frame.
    pub random_frame_phase: bool,
}

impl SimNoise {
    pub fn none() -> Self {
        SimNoise {
            thermal_std: 0.0,
            clutter_amplitude: 0.0,
            random_frame_phase: false,
        }
    }
}

impl Default for SimNoise {
    fn default() -> Self {
        SimNoise {
            thermal_std: 0.02,
            clutter_amplitude: 0.5,
            random_frame_phase: true,
        }
    }
}

/// Renders the real IF signal of every chirp.
///
/// For scatterer amplitude `a` and effective range `R_r = (|p| + |p - rx_r|) / 2`
/// (TX at the origin) the sample `m` of a chirp is
///
/// ```text
/// a cos(2 pi f_b(R_r) (m / adc_rate - T / 2) + 4 pi R_r / lambda + phi_frame)
/// ```
///
/// with fast time referenced to the chirp midpoint, where the transmitted
/// frequency equals the center frequency that defines `lambda`.
pub fn synthesize_cube(
    trajectory: &Trajectory,
    config: &RadarConfig,
    noise: &SimNoise,
    seed: u64,
) -> Result<FrameCube> {
    config.validate()?;
    if trajectory.chirps() != config.chirps_per_frame {
        return Err(Error::Simulation(format!(
            "trajectory has {} chirps per frame, config {}",
            trajectory.chirps(),
            config.chirps_per_frame
        )));
    }
    if noise.thermal_std < 0.0 || !noise.thermal_std.is_finite() {
        return Err(Error::Simulation("thermal noise std must be >= 0".into()));
    }
    let frames = trajectory.frames();
    let (rx, chirps, m_len) = (
        config.rx_count,
        config.chirps_per_frame,
        config.samples_per_chirp,
    );
    let lambda = config.wavelength();
    let r_max = config.max_range();
    let antennas: Vec<[f64; 3]> = (0..rx).map(|r| config.antenna_position_m(r)).collect();
    let center = m_len as f64 / 2.0;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame_phase: Vec<f64> = (0..frames)
        .map(|_| {
            if noise.random_frame_phase {
                rng.random_range(-PI..PI)
            } else {
                0.0
            }
        })
        .collect();

    let mut samples = vec![0.0; frames * rx * chirps * m_len];
    let add_tone = |buf: &mut [f64], amplitude: f64, range: f64, phase: f64| -> Result<()> {
        let fb = config.beat_frequency(range);
        if range >= r_max {
            return Err(Error::Simulation(format!(
                "range {range:.4} m beyond unambiguous {r_max:.4} m (beat {fb:.0} Hz)"
            )));
        }
        let omega = 2.0 * PI * fb / config.adc_rate;
        let carrier = 4.0 * PI * range / lambda + phase;
        // phasor recursion: z_m = exp(j (omega (m - M/2) + carrier))
        let step = Complex64::from_polar(1.0, omega);
        let mut z = Complex64::from_polar(amplitude, carrier - omega * center);
        for v in buf.iter_mut() {
            *v += z.re;
            z *= step;
        }
        Ok(())
    };

    for f in 0..frames {
        for r in 0..rx {
            for n in 0..chirps {
                let k = f * chirps + n;
                let start = ((f * rx + r) * chirps + n) * m_len;
                let buf = &mut samples[start..start + m_len];
                for s in trajectory.scatterers() {
                    let a = s.amplitudes[k];
                    if a == 0.0 {
                        continue;
                    }
                    let p = &s.positions[k];
                    let range = 0.5 * (norm(p) + dist(p, &antennas[r]));
                    add_tone(buf, a, range, frame_phase[f])?;
                }
                if noise.clutter_amplitude != 0.0 {
                    let p = [0.0, 0.0, CLUTTER_RANGE];
                    let range = 0.5 * (norm(&p) + dist(&p, &antennas[r]));
                    add_tone(buf, noise.clutter_amplitude, range, frame_phase[f])?;
                    buf.iter_mut().for_each(|v| *v += noise.clutter_amplitude);
                }
            }
        }
    }

    if noise.thermal_std > 0.0 {
        let normal = Normal::new(0.0, noise.thermal_std)
            .map_err(|e| Error::Simulation(e.to_string()))?;
        for v in samples.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }
    FrameCube::new(config.clone(), frames, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Scatterer;

    fn config() -> RadarConfig {
        RadarConfig::default()
    }

    /// Independent DFT magnitude peak over the positive half.
    fn dft_peak(x: &[f64]) -> usize {
        let m = x.len();
        (0..m / 2)
            .max_by(|&a, &b| dft_mag(x, a).partial_cmp(&dft_mag(x, b)).unwrap())
            .unwrap()
    }

    fn dft_mag(x: &[f64], k: usize) -> f64 {
        let m = x.len() as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (i, v) in x.iter().enumerate() {
            let a = -2.0 * PI * k as f64 * i as f64 / m;
            re += v * a.cos();
            im += v * a.sin();
        }
        (re * re + im * im).sqrt()
    }

    #[test]
    fn static_point_tone() {
        let c = config();
        let traj = Trajectory::stationary(&c, 2, [0.0, 0.0, 0.30], 1.0).unwrap();
        let cube = synthesize_cube(&traj, &c, &SimNoise::none(), 1).unwrap();
        for f in 0..2 {
            for r in 0..3 {
                let first = cube.chirp(f, r, 0).to_vec();
                for n in 1..32 {
                    assert_eq!(cube.chirp(f, r, n), first.as_slice());
                }
            }
        }
        // closed form: 2 R BW / (c T) = 312.5 kHz (312.7 with exact c)
        let fb = c.beat_frequency(0.30);
        assert!((fb - 312.5e3).abs() < 500.0, "{fb}");
        assert_eq!(dft_peak(cube.chirp(0, 2, 0)), 10);
    }

    #[test]
    fn zero_reflectivity_is_silent() {
        let c = config();
        let traj = Trajectory::stationary(&c, 3, [0.1, 0.0, 0.3], 0.0).unwrap();
        let cube = synthesize_cube(&traj, &c, &SimNoise::none(), 9).unwrap();
        assert!(cube.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn azimuth_phase_difference() {
        let c = config();
        let theta = 20f64.to_radians();
        let range = 0.5;
        let p = [range * theta.sin(), 0.0, range * theta.cos()];
        let traj = Trajectory::stationary(&c, 1, p, 1.0).unwrap();
        let cube = synthesize_cube(&traj, &c, &SimNoise::none(), 0).unwrap();

        // Hann-windowed projection onto the tone at its own beat frequency
        let phase_at = |r: usize| {
            let x = cube.chirp(0, r, 0);
            let fs = c.adc_rate;
            let rr = 0.5 * (norm(&p) + dist(&p, &c.antenna_position_m(r)));
            let w = 2.0 * PI * c.beat_frequency(rr) / fs;
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, v) in x.iter().enumerate() {
                let win = 0.5 - 0.5 * (2.0 * PI * m as f64 / 64.0).cos();
                acc += v * win * Complex64::from_polar(1.0, -w * (m as f64 - 32.0));
            }
            acc.arg()
        };
        let measured = crate::timeseries::wrap_phase(phase_at(0) - phase_at(2));

        // exact geometric path-length difference between antennas 1 and 3
        let lambda = c.wavelength();
        let geometric = 2.0 * PI * (dist(&p, &c.antenna_position_m(0)) - dist(&p, &c.antenna_position_m(2))) / lambda;
        assert!((measured - geometric).abs() < 1e-2 * geometric.abs(), "{measured} vs {geometric}");
        let far_field = PI * theta.sin();
        assert!((geometric - far_field).abs() < 0.01 * far_field, "{geometric} vs {far_field}");
    }

    #[test]
    fn linear_in_scatterers() {
        let c = config();
        let a = Trajectory::sample(&c, 2, |t| [([0.02, 0.0, 0.25 + 0.3 * t], 0.8)]).unwrap();
        let b = Trajectory::sample(&c, 2, |t| [([-0.05, 0.03, 0.4 - 0.2 * t], 0.5)]).unwrap();
        let both = a.clone().merged(b.clone()).unwrap();
        let noise = SimNoise {
            random_frame_phase: true,
            ..SimNoise::none()
        };
        let ca = synthesize_cube(&a, &c, &noise, 5).unwrap();
        let cb = synthesize_cube(&b, &c, &noise, 5).unwrap();
        let cab = synthesize_cube(&both, &c, &noise, 5).unwrap();
        for ((x, y), z) in ca.samples().iter().zip(cb.samples()).zip(cab.samples()) {
            assert!((x + y - z).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let c = config();
        let traj = Trajectory::stationary(&c, 2, [0.0, 0.0, 0.3], 1.0).unwrap();
        let n = SimNoise::default();
        let x = synthesize_cube(&traj, &c, &n, 42).unwrap();
        let y = synthesize_cube(&traj, &c, &n, 42).unwrap();
        let z = synthesize_cube(&traj, &c, &n, 43).unwrap();
        assert_eq!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn beyond_unambiguous_range_fails() {
        let c = config();
        let traj = Trajectory::stationary(&c, 1, [0.0, 0.0, 0.99], 1.0).unwrap();
        let err = synthesize_cube(&traj, &c, &SimNoise::none(), 0).unwrap_err();
        assert!(matches!(err, Error::Simulation(_)));
    }

    #[test]
    fn mismatched_grid_fails() {
        let c = config();
        let traj = Trajectory::new(&c, 1, vec![Scatterer { positions: vec![], amplitudes: vec![] }]);
        assert!(traj.is_err());
    }
}
