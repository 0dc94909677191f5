//! Radar configuration, raw data cubes, DC removal and the RGR1 recording format.

mod config;
mod cube;
mod record;

pub use config::{RadarConfig, DEFAULT_ANTENNAS};
pub use cube::{subtract_means, FrameCube};
pub use record::{
    read_recording, read_recording_file, write_recording, write_recording_file, write_sidecar,
    GestureRecord, RecordingHeader, RECORDING_HEADER_LEN, RECORDING_MAGIC,
};
