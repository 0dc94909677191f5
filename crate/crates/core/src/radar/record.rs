//! RGR1 recordings.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "RGR1"
//!      4    16  u32 F, R, N, M
//!     20     1  u8 label
//!     21     1  u8 subject
//!     22    40  f64 f_min, f_max, t_prt, adc_rate, frame_rate
//!     62   4*K  f32 samples in [f][r][n][m] order, K = F*R*N*M
//! ```
//!
//! All fields little-endian. Antenna positions are not stored; readers assume
//! the default L-shaped layout.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::binio::{Reader, Writer};
use crate::error::{Error, Result};
use crate::radar::{FrameCube, RadarConfig, DEFAULT_ANTENNAS};

pub const RECORDING_MAGIC: &[u8; 4] = b"RGR1";
pub const RECORDING_HEADER_LEN: usize = 62;

/// Largest accepted sample count; guards allocation on corrupt headers.
const MAX_SAMPLES: u64 = 1 << 31;

/// One labelled gesture recording.
#[derive(Debug, Clone, PartialEq)]
pub struct GestureRecord {
    pub cube: FrameCube,
    /// Gesture class id in `0..10`.
    pub label: u8,
    pub subject: u8,
}

impl GestureRecord {
    pub fn new(cube: FrameCube, label: u8, subject: u8) -> Result<Self> {
        if label >= 10 {
            return Err(Error::Validation(format!("label {label} outside 0..10")));
        }
        Ok(GestureRecord {
            cube,
            label,
            subject,
        })
    }

    /// Recording length in seconds, `F / frame_rate`.
    pub fn duration(&self) -> f64 {
        self.cube.frames() as f64 / self.cube.config().frame_rate
    }

    pub fn header(&self) -> RecordingHeader {
        let (f, r, n, m) = self.cube.dims();
        let c = self.cube.config();
        RecordingHeader {
            frames: f as u32,
            rx_count: r as u32,
            chirps_per_frame: n as u32,
            samples_per_chirp: m as u32,
            label: self.label,
            subject: self.subject,
            f_min: c.f_min,
            f_max: c.f_max,
            t_prt: c.t_prt,
            adc_rate: c.adc_rate,
            frame_rate: c.frame_rate,
        }
    }
}

/// Header fields of an RGR1 file; also the JSON sidecar schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingHeader {
    pub frames: u32,
    pub rx_count: u32,
    pub chirps_per_frame: u32,
    pub samples_per_chirp: u32,
    pub label: u8,
    pub subject: u8,
    pub f_min: f64,
    pub f_max: f64,
    pub t_prt: f64,
    pub adc_rate: f64,
    pub frame_rate: f64,
}

/// Serializes `record` into `dest`; returns the number of bytes written.
pub fn write_recording(record: &GestureRecord, dest: &mut impl std::io::Write) -> Result<usize> {
    let h = record.header();
    let mut w = Writer::new();
    w.bytes(RECORDING_MAGIC);
    for v in [h.frames, h.rx_count, h.chirps_per_frame, h.samples_per_chirp] {
        w.u32(v);
    }
    w.u8(h.label);
    w.u8(h.subject);
    for v in [h.f_min, h.f_max, h.t_prt, h.adc_rate, h.frame_rate] {
        w.f64(v);
    }
    w.buf.reserve(record.cube.samples().len() * 4);
    for &s in record.cube.samples() {
        w.f32(s as f32);
    }
    dest.write_all(&w.buf)?;
    Ok(w.buf.len())
}

pub fn read_recording(bytes: &[u8]) -> Result<GestureRecord> {
    let mut r = Reader::new(bytes);
    r.magic(RECORDING_MAGIC)?;
    let dims_offset = r.offset();
    let frames = r.u32("frame count")?;
    let rx = r.u32("rx count")?;
    let chirps = r.u32("chirp count")?;
    let samples = r.u32("sample count")?;
    let total = [frames, rx, chirps, samples]
        .iter()
        .try_fold(1u64, |acc, &d| acc.checked_mul(d as u64))
        .filter(|&t| t <= MAX_SAMPLES)
        .ok_or_else(|| Error::format(dims_offset, "dimension overflow"))?;
    let label_offset = r.offset();
    let label = r.u8("label")?;
    if label >= 10 {
        return Err(Error::format(label_offset, format!("label {label} outside 0..10")));
    }
    let subject = r.u8("subject")?;
    let cfg_offset = r.offset();
    let f_min = r.f64("f_min")?;
    let f_max = r.f64("f_max")?;
    let t_prt = r.f64("t_prt")?;
    let adc_rate = r.f64("adc_rate")?;
    let frame_rate = r.f64("frame_rate")?;
    let config = RadarConfig {
        f_min,
        f_max,
        t_prt,
        chirps_per_frame: chirps as usize,
        samples_per_chirp: samples as usize,
        adc_rate,
        frame_rate,
        rx_count: rx as usize,
        antenna_positions: default_layout(rx as usize),
    };
    config
        .validate()
        .map_err(|e| Error::format(cfg_offset, e.to_string()))?;
    if (r.remaining() as u64) < total * 4 {
        return Err(Error::format(
            r.offset() + r.remaining() as u64,
            format!(
                "truncated payload: {} of {} sample bytes",
                r.remaining(),
                total * 4
            ),
        ));
    }
    let data = r.f32_vec(total as usize, "samples")?;
    r.finish()?;
    let cube = FrameCube::new(
        config,
        frames as usize,
        data.into_iter().map(f64::from).collect(),
    )?;
    Ok(GestureRecord {
        cube,
        label,
        subject,
    })
}

pub fn write_recording_file(record: &GestureRecord, path: impl AsRef<Path>) -> Result<usize> {
    let mut buf = Vec::new();
    let n = write_recording(record, &mut buf)?;
    fs::write(path, buf)?;
    Ok(n)
}

pub fn read_recording_file(path: impl AsRef<Path>) -> Result<GestureRecord> {
    read_recording(&fs::read(path)?)
}

/// Writes the human-readable header mirror next to `recording_path` (same stem, `.json`).
pub fn write_sidecar(record: &GestureRecord, recording_path: impl AsRef<Path>) -> Result<()> {
    let path = recording_path.as_ref().with_extension("json");
    fs::write(path, serde_json::to_vec_pretty(&record.header())?)?;
    Ok(())
}

fn default_layout(rx: usize) -> Vec<[f64; 2]> {
    if rx == DEFAULT_ANTENNAS.len() {
        DEFAULT_ANTENNAS.to_vec()
    } else {
        (0..rx).map(|i| [-0.5 * i as f64, 0.0]).collect()
    }
}
