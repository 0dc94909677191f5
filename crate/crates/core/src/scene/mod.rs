//! Synthetic FMCW scenes: point-scatterer trajectories, the IF signal model,
//! ten parametric gesture templates and a by-subject dataset generator.

mod dataset;
mod synth;
mod templates;
mod trajectory;

pub use dataset::{generate_dataset, plan_dataset, DatasetPlan, RecordSpec};
pub use synth::{synthesize_cube, SimNoise};
pub use templates::{GestureClass, GestureTemplate, Jitter, SubjectProfile};
pub use trajectory::{Scatterer, Trajectory, MAX_RANGE, MIN_RANGE};

/// SplitMix64 finalizer, used to derive independent RNG streams from a seed.
pub(crate) fn mix_seed(parts: &[u64]) -> u64 {
    let mut z: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        z ^= p;
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}
