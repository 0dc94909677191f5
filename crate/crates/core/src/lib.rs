//! FMCW radar gesture sensing without the FFT.
//!
//! The crate reduces a recording of raw radar frames to four 1D time series
//! (relative range, accumulated azimuth and elevation phase, magnitude) and
//! keeps the conventional range-Doppler / beamforming route alongside it so
//! the two can be compared on identical data.
//!
//! ```text
//! scene ──► FrameCube ──► remove_dc ─┬─► project (sinc) ──► TimeSeriesFeatures ──► conv1d
//!                                    └─► range_doppler ──► SpectrogramSet ──────► conv2d
//! ```
//!
//! Every DSP stage can report the arithmetic it performed through an
//! [`OpCount`], which is what the complexity benchmark is built on.

pub mod conventional;
pub mod error;
pub mod harness;
pub mod micronet;
pub mod ops;
pub mod radar;
pub mod scene;
pub mod timeseries;

mod binio;

pub use conventional::{BeamformingGrid, RangeDopplerImage, RdiCube, SpectrogramSet};
pub use error::{Error, Result};
pub use ops::OpCount;
pub use radar::{FrameCube, GestureRecord, RadarConfig};
pub use scene::{GestureClass, SimNoise, Trajectory};
pub use timeseries::{ComplexFrameMatrix, SincFilter, TimeSeriesFeatures};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
