//! FFT-free reduction of radar frames to four 1D time series.
//!
//! Each chirp is collapsed to one complex value by an inner product with a
//! complex sinc band-pass ([`SincFilter`]). From the resulting `F x R x N`
//! matrix we derive
//!
//! * magnitude, summed over receivers,
//! * accumulated spatial phase difference for the azimuth and elevation pairs,
//! * relative range from slow-time phase steps, with frame boundaries bridged
//!   by interpolation so the random inter-frame phase never enters.

mod export;
mod features;
mod filter;
mod project;

pub use export::{read_features, write_features, write_features_csv, FEATURES_MAGIC};
pub use features::{
    accumulated_aoa, extract_features, extract_features_counted, magnitude_track, naive_concatenated_range,
    relative_range,
    FeatureConfig, TimeSeriesFeatures,
};
pub use filter::{SincFilter, Window};
pub use project::{project, project_counted, ComplexFrameMatrix};

use std::f64::consts::PI;

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_range() {
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(0.5) - 0.5).abs() < 1e-15);
        assert!((wrap_phase(-0.5 - 4.0 * PI) + 0.5).abs() < 1e-12);
    }
}
