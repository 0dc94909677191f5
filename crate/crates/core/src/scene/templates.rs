//! Parametric hand kinematics for the ten gesture classes.
//!
//! Macro gestures move one hand scatterer along a smooth eased path spanning
//! well over 5 cm. Micro gestures keep the palm still and oscillate two
//! counter-phase finger scatterers by a few millimetres.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radar::RadarConfig;
use crate::scene::mix_seed;
use crate::scene::trajectory::{norm, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GestureClass {
    LeftRight,
    RightLeft,
    TopDown,
    DownTop,
    CircleCw,
    CircleCcw,
    Forward,
    Backward,
    FingerWave,
    FingerRub,
}

impl GestureClass {
    pub const ALL: [GestureClass; 10] = [
        GestureClass::LeftRight,
        GestureClass::RightLeft,
        GestureClass::TopDown,
        GestureClass::DownTop,
        GestureClass::CircleCw,
        GestureClass::CircleCcw,
        GestureClass::Forward,
        GestureClass::Backward,
        GestureClass::FingerWave,
        GestureClass::FingerRub,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Result<Self> {
        Self::ALL
            .get(id as usize)
            .copied()
            .ok_or_else(|| Error::Validation(format!("gesture id {id} outside 0..10")))
    }

    pub fn name(self) -> &'static str {
        match self {
            GestureClass::LeftRight => "left-right",
            GestureClass::RightLeft => "right-left",
            GestureClass::TopDown => "top-down",
            GestureClass::DownTop => "down-top",
            GestureClass::CircleCw => "circle-cw",
            GestureClass::CircleCcw => "circle-ccw",
            GestureClass::Forward => "forward",
            GestureClass::Backward => "backward",
            GestureClass::FingerWave => "finger-wave",
            GestureClass::FingerRub => "finger-rub",
        }
    }

    pub fn is_micro(self) -> bool {
        matches!(self, GestureClass::FingerWave | GestureClass::FingerRub)
    }
}

/// How one synthetic person performs gestures. Drawn once per subject.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubjectProfile {
    pub speed_scale: f64,
    /// Shift of the gesture start (s).
    pub start_offset: f64,
    pub amplitude_scale: f64,
    /// Resting hand offset from the nominal position (m).
    pub offset: [f64; 3],
    pub noise_seed: u64,
}

impl SubjectProfile {
    pub fn nominal() -> Self {
        SubjectProfile {
            speed_scale: 1.0,
            start_offset: 0.0,
            amplitude_scale: 1.0,
            offset: [0.0; 3],
            noise_seed: 0,
        }
    }

    pub fn draw(seed: u64, subject: u8) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[seed, 0x5u64, subject as u64]));
        SubjectProfile {
            speed_scale: rng.random_range(0.8..1.25),
            start_offset: rng.random_range(-0.15..0.15),
            amplitude_scale: rng.random_range(0.75..1.25),
            offset: [
                rng.random_range(-0.03..0.03),
                rng.random_range(-0.03..0.03),
                rng.random_range(-0.03..0.03),
            ],
            noise_seed: rng.random(),
        }
    }
}

/// Per-repetition variation on top of the subject profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jitter {
    pub speed: f64,
    pub start: f64,
    pub amplitude: f64,
    pub offset: [f64; 3],
}

impl Jitter {
    pub fn none() -> Self {
        Jitter {
            speed: 1.0,
            start: 0.0,
            amplitude: 1.0,
            offset: [0.0; 3],
        }
    }

    pub fn draw(rng: &mut impl Rng) -> Self {
        Jitter {
            speed: rng.random_range(0.92..1.08),
            start: rng.random_range(-0.08..0.08),
            amplitude: rng.random_range(0.92..1.08),
            offset: [
                rng.random_range(-0.01..0.01),
                rng.random_range(-0.01..0.01),
                rng.random_range(-0.01..0.01),
            ],
        }
    }
}

/// A gesture class bound to its path generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GestureTemplate {
    pub class: GestureClass,
}

const REST: [f64; 3] = [0.0, 0.0, 0.25];
const SWIPE_HALF_SPAN: f64 = 0.10;
const CIRCLE_RADIUS: f64 = 0.06;
const PUSH_HALF_SPAN: f64 = 0.08;
const NOMINAL_DURATION: f64 = 1.0;
const NOMINAL_START: f64 = 0.45;

impl GestureTemplate {
    pub fn new(class: GestureClass) -> Self {
        GestureTemplate { class }
    }

    pub fn all() -> Vec<GestureTemplate> {
        GestureClass::ALL.iter().map(|&c| Self::new(c)).collect()
    }

    pub fn trajectory(
        &self,
        config: &RadarConfig,
        frames: usize,
        profile: &SubjectProfile,
        jitter: &Jitter,
    ) -> Result<Trajectory> {
        let total = frames as f64 / config.frame_rate;
        let speed = profile.speed_scale * jitter.speed;
        let length = (NOMINAL_DURATION / speed).min(total - 0.1).max(0.2);
        let start = (NOMINAL_START + profile.start_offset + jitter.start).clamp(0.05, (total - length - 0.05).max(0.0));
        let amp = profile.amplitude_scale * jitter.amplitude;
        let base = [
            REST[0] + profile.offset[0] + jitter.offset[0],
            REST[1] + profile.offset[1] + jitter.offset[1],
            REST[2] + profile.offset[2] + jitter.offset[2],
        ];
        let progress = move |t: f64| ((t - start) / length).clamp(0.0, 1.0);
        let ease = |tau: f64| 0.5 - 0.5 * (PI * tau).cos();
        let hand = |p: [f64; 3]| (p, reflectivity(1.0, &p));

        match self.class {
            GestureClass::LeftRight | GestureClass::RightLeft => {
                let dir = if self.class == GestureClass::LeftRight { 1.0 } else { -1.0 };
                Trajectory::sample(config, frames, |t| {
                    let u = ease(progress(t));
                    let x = base[0] + dir * SWIPE_HALF_SPAN * amp * (2.0 * u - 1.0);
                    [hand([x, base[1], base[2]])]
                })
            }
            GestureClass::TopDown | GestureClass::DownTop => {
                let dir = if self.class == GestureClass::DownTop { 1.0 } else { -1.0 };
                Trajectory::sample(config, frames, |t| {
                    let u = ease(progress(t));
                    let y = base[1] + dir * SWIPE_HALF_SPAN * amp * (2.0 * u - 1.0);
                    [hand([base[0], y, base[2]])]
                })
            }
            GestureClass::CircleCw | GestureClass::CircleCcw => {
                let dir = if self.class == GestureClass::CircleCw { 1.0 } else { -1.0 };
                let radius = CIRCLE_RADIUS * amp;
                Trajectory::sample(config, frames, |t| {
                    let a = 2.0 * PI * ease(progress(t));
                    let x = base[0] + dir * radius * a.sin();
                    let y = base[1] + radius * a.cos();
                    [hand([x, y, base[2]])]
                })
            }
            GestureClass::Forward | GestureClass::Backward => {
                let dir = if self.class == GestureClass::Backward { 1.0 } else { -1.0 };
                Trajectory::sample(config, frames, |t| {
                    let u = ease(progress(t));
                    let z = base[2] + dir * PUSH_HALF_SPAN * amp * (2.0 * u - 1.0);
                    [hand([base[0], base[1], z])]
                })
            }
            GestureClass::FingerWave => {
                // index finger flapping toward the radar, neighbour in counter-phase
                let amplitude = 0.006 * amp.clamp(0.6, 1.3);
                let freq = 2.5 * speed;
                Trajectory::sample(config, frames, |t| {
                    let tau = progress(t);
                    let d = amplitude * (PI * tau).sin() * (2.0 * PI * freq * (t - start)).sin();
                    let tip = [base[0], base[1] + 0.02, base[2] - 0.01 - d];
                    let next = [base[0] + 0.015, base[1] + 0.015, base[2] - 0.005 + d];
                    [
                        (base, reflectivity(1.0, &base)),
                        (tip, reflectivity(0.5, &tip)),
                        (next, reflectivity(0.15, &next)),
                    ]
                })
            }
            GestureClass::FingerRub => {
                // thumb sliding sideways over the index finger
                let amplitude = 0.0035 * amp.clamp(0.86, 1.3);
                let freq = 5.0 * speed;
                Trajectory::sample(config, frames, |t| {
                    let tau = progress(t);
                    let d = amplitude * (PI * tau).sin() * (2.0 * PI * freq * (t - start)).sin();
                    let thumb = [base[0] + d, base[1] + 0.01, base[2] - 0.015 - 0.3 * d];
                    let index = [base[0] - d, base[1] + 0.012, base[2] - 0.012 + 0.3 * d];
                    [
                        (base, reflectivity(1.0, &base)),
                        (thumb, reflectivity(0.45, &thumb)),
                        (index, reflectivity(0.15, &index)),
                    ]
                })
            }
        }
    }
}

/// Received amplitude with a two-way spreading falloff normalized at the rest range.
fn reflectivity(rcs: f64, p: &[f64; 3]) -> f64 {
    let r = norm(p);
    rcs * (REST[2] / r).powi(2)
}
