use crate::error::{Error, Result};
use crate::radar::RadarConfig;

/// Shortest range a scatterer may take (m).
pub const MIN_RANGE: f64 = 0.05;
/// Longest range a scatterer may take (m).
pub const MAX_RANGE: f64 = 1.0;

/// One point scatterer, sampled at every chirp. Positions are metres with
/// `x` along azimuth, `y` along elevation and `z` along boresight.
#[derive(Debug, Clone, PartialEq)]
pub struct Scatterer {
    pub positions: Vec<[f64; 3]>,
    pub amplitudes: Vec<f64>,
}

/// Scatterer motion sampled at chirp start times `t[f, n] = f / frame_rate + n t_prt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    frames: usize,
    chirps: usize,
    times: Vec<f64>,
    scatterers: Vec<Scatterer>,
}

impl Trajectory {
    pub fn new(config: &RadarConfig, frames: usize, scatterers: Vec<Scatterer>) -> Result<Self> {
        let chirps = config.chirps_per_frame;
        let times: Vec<f64> = (0..frames)
            .flat_map(|f| (0..chirps).map(move |n| (f, n)))
            .map(|(f, n)| config.chirp_time(f, n))
            .collect();
        for (i, s) in scatterers.iter().enumerate() {
            if s.positions.len() != times.len() || s.amplitudes.len() != times.len() {
                return Err(Error::Simulation(format!(
                    "scatterer {i} has {} positions for {} chirps",
                    s.positions.len(),
                    times.len()
                )));
            }
            for (k, (p, a)) in s.positions.iter().zip(&s.amplitudes).enumerate() {
                if !p.iter().all(|v| v.is_finite()) || !a.is_finite() || *a < 0.0 {
                    return Err(Error::Simulation(format!(
                        "scatterer {i} sample {k}: non-finite position or negative amplitude"
                    )));
                }
                let r = norm(p);
                if !(MIN_RANGE..=MAX_RANGE).contains(&r) {
                    return Err(Error::Simulation(format!(
                        "scatterer {i} sample {k}: range {r:.4} m outside [{MIN_RANGE}, {MAX_RANGE}]"
                    )));
                }
            }
        }
        Ok(Trajectory {
            frames,
            chirps,
            times,
            scatterers,
        })
    }

    /// Samples `path(t)` at every chirp; `path` returns `(position, amplitude)` per scatterer.
    pub fn sample<const S: usize>(
        config: &RadarConfig,
        frames: usize,
        mut path: impl FnMut(f64) -> [([f64; 3], f64); S],
    ) -> Result<Self> {
        let mut scatterers: Vec<Scatterer> = (0..S)
            .map(|_| Scatterer {
                positions: Vec::with_capacity(frames * config.chirps_per_frame),
                amplitudes: Vec::with_capacity(frames * config.chirps_per_frame),
            })
            .collect();
        for f in 0..frames {
            for n in 0..config.chirps_per_frame {
                let pts = path(config.chirp_time(f, n));
                for (s, (p, a)) in scatterers.iter_mut().zip(pts) {
                    s.positions.push(p);
                    s.amplitudes.push(a);
                }
            }
        }
        Self::new(config, frames, scatterers)
    }

    /// A single scatterer that does not move.
    pub fn stationary(config: &RadarConfig, frames: usize, position: [f64; 3], amplitude: f64) -> Result<Self> {
        Self::sample(config, frames, |_| [(position, amplitude)])
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn chirps(&self) -> usize {
        self.chirps
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn scatterers(&self) -> &[Scatterer] {
        &self.scatterers
    }

    /// Sum of two scenes sampled on the same chirp grid.
    pub fn merged(mut self, other: Trajectory) -> Result<Trajectory> {
        if self.frames != other.frames || self.chirps != other.chirps {
            return Err(Error::Simulation("trajectories sampled on different grids".into()));
        }
        self.scatterers.extend(other.scatterers);
        Ok(self)
    }

    /// Largest per-chirp displacement of any scatterer divided by `t_prt`,
    /// taken within frames only (m/s).
    pub fn max_speed(&self, t_prt: f64) -> f64 {
        let mut best = 0.0f64;
        for s in &self.scatterers {
            for f in 0..self.frames {
                for n in 0..self.chirps.saturating_sub(1) {
                    let k = f * self.chirps + n;
                    let d = dist(&s.positions[k], &s.positions[k + 1]);
                    best = best.max(d / t_prt);
                }
            }
        }
        best
    }
}

pub(crate) fn norm(p: &[f64; 3]) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

pub(crate) fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}
