//! Per-recording spectrograms and their file formats.
//!
//! SPG1 binary, little-endian:
//!
//! ```text
//! magic "SPG1"
//! u32 F, u32 range bins, u32 Doppler bins, u32 angle count
//! f64 range bin spacing (m), f64 Doppler bin spacing (m/s)
//! f64 x A steering angles (deg)
//! u8 x F empty-frame flags
//! f32 blocks: range F*Mr, doppler F*Nd, azimuth F*A, elevation F*A
//! ```

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::binio::{Reader, Writer};
use crate::conventional::{beamform_counted, marginalize_counted, range_doppler_counted, BeamformingGrid};
use crate::error::{Error, Result};
use crate::ops::OpCount;
use crate::radar::FrameCube;

pub const SPECTROGRAM_MAGIC: &[u8; 4] = b"SPG1";

/// Range, Doppler, azimuth and elevation spectrograms of one recording, each
/// row-major with one row per frame. All entries are non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrogramSet {
    pub frames: usize,
    pub range: Vec<f64>,
    pub doppler: Vec<f64>,
    pub azimuth: Vec<f64>,
    pub elevation: Vec<f64>,
    /// Metres per range bin.
    pub range_step: f64,
    /// m/s per Doppler bin; bin `N/2` is zero velocity.
    pub doppler_step: f64,
    /// Steering angles (deg).
    pub angles_deg: Vec<f64>,
    /// Frames with no energy, for which the angle rows are zero.
    pub empty_frames: Vec<bool>,
}

impl SpectrogramSet {
    pub fn range_bins(&self) -> usize {
        self.range.len().checked_div(self.frames).unwrap_or(0)
    }

    pub fn doppler_bins(&self) -> usize {
        self.doppler.len().checked_div(self.frames).unwrap_or(0)
    }

    pub fn angle_bins(&self) -> usize {
        self.angles_deg.len()
    }

    pub fn range_axis(&self) -> Vec<f64> {
        (0..self.range_bins()).map(|k| k as f64 * self.range_step).collect()
    }

    pub fn doppler_axis(&self) -> Vec<f64> {
        let centre = (self.doppler_bins() / 2) as f64;
        (0..self.doppler_bins()).map(|k| (k as f64 - centre) * self.doppler_step).collect()
    }

    /// Row `frame` of each of the four maps.
    pub fn frame(&self, frame: usize) -> [&[f64]; 4] {
        let (r, d, a) = (self.range_bins(), self.doppler_bins(), self.angle_bins());
        [
            &self.range[frame * r..(frame + 1) * r],
            &self.doppler[frame * d..(frame + 1) * d],
            &self.azimuth[frame * a..(frame + 1) * a],
            &self.elevation[frame * a..(frame + 1) * a],
        ]
    }

    fn check(&self) -> Result<()> {
        let f = self.frames;
        let a = self.angle_bins();
        let ok = self.empty_frames.len() == f
            && self.azimuth.len() == f * a
            && self.elevation.len() == f * a
            && (f == 0 || (self.range.len() % f == 0 && self.doppler.len() % f == 0));
        if ok {
            Ok(())
        } else {
            Err(Error::Shape("inconsistent spectrogram dimensions".into()))
        }
    }
}

pub fn spectrograms(cube: &FrameCube, grid: &BeamformingGrid) -> Result<SpectrogramSet> {
    spectrograms_counted(cube, grid, &mut OpCount::new())
}

/// Whole FFT route: DC removal when needed, range-Doppler maps,
/// marginalisation and beamforming.
pub fn spectrograms_counted(cube: &FrameCube, grid: &BeamformingGrid, ops: &mut OpCount) -> Result<SpectrogramSet> {
    let owned;
    let cube = if cube.is_dc_removed() {
        cube
    } else {
        owned = cube.remove_dc_counted(ops)?;
        &owned
    };
    let rdi = range_doppler_counted(cube, ops)?;
    let (range, doppler) = marginalize_counted(&rdi, ops);
    let beams = beamform_counted(&rdi, grid, ops)?;
    let config = cube.config();
    Ok(SpectrogramSet {
        frames: cube.frames(),
        range,
        doppler,
        empty_frames: beams.peaks.iter().map(|p| p.is_none()).collect(),
        azimuth: beams.azimuth,
        elevation: beams.elevation,
        range_step: config.range_resolution(),
        doppler_step: config.velocity_resolution(),
        angles_deg: grid.degrees(),
    })
}

/// CSV with one row per frame: `frame,empty,range_*,doppler_*,azimuth_*,elevation_*`.
pub fn write_spectrograms_csv(set: &SpectrogramSet, out: &mut impl Write) -> Result<()> {
    set.check()?;
    let mut header = vec!["frame".to_string(), "empty".to_string()];
    for (name, n) in [
        ("range", set.range_bins()),
        ("doppler", set.doppler_bins()),
        ("azimuth", set.angle_bins()),
        ("elevation", set.angle_bins()),
    ] {
        header.extend((0..n).map(|i| format!("{name}_{i}")));
    }
    writeln!(out, "{}", header.join(","))?;
    for f in 0..set.frames {
        let mut row = vec![f.to_string(), (set.empty_frames[f] as u8).to_string()];
        for part in set.frame(f) {
            row.extend(part.iter().map(|v| v.to_string()));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_spectrograms(set: &SpectrogramSet, out: &mut impl Write) -> Result<usize> {
    set.check()?;
    let dim = |v: usize| u32::try_from(v).map_err(|_| Error::Shape(format!("dimension {v} does not fit a u32")));
    let mut w = Writer::new();
    w.bytes(SPECTROGRAM_MAGIC);
    for v in [set.frames, set.range_bins(), set.doppler_bins(), set.angle_bins()] {
        w.u32(dim(v)?);
    }
    w.f64(set.range_step);
    w.f64(set.doppler_step);
    for &a in &set.angles_deg {
        w.f64(a);
    }
    for &e in &set.empty_frames {
        w.u8(e as u8);
    }
    for block in [&set.range, &set.doppler, &set.azimuth, &set.elevation] {
        for &v in block.iter() {
            w.f32(v as f32);
        }
    }
    out.write_all(&w.buf)?;
    Ok(w.buf.len())
}

pub fn read_spectrograms(data: &[u8]) -> Result<SpectrogramSet> {
    let mut r = Reader::new(data);
    r.magic(SPECTROGRAM_MAGIC)?;
    let dims_at = r.offset();
    let mut dims = [0usize; 4];
    for d in dims.iter_mut() {
        *d = r.u32("dimensions")? as usize;
    }
    let [frames, nr, nd, na] = dims;
    let total = (frames as u64) * (nr as u64 + nd as u64 + 2 * na as u64);
    if total > (1 << 31) {
        return Err(Error::format(dims_at, format!("{total} values exceed the size limit")));
    }
    let range_step = r.f64("range step")?;
    let doppler_step = r.f64("doppler step")?;
    let mut angles_deg = Vec::with_capacity(na);
    for _ in 0..na {
        angles_deg.push(r.f64("angles")?);
    }
    let flags_at = r.offset();
    let flags = r.take(frames, "empty-frame flags")?;
    if let Some(i) = flags.iter().position(|&b| b > 1) {
        return Err(Error::format(flags_at + i as u64, format!("flag value {}", flags[i])));
    }
    let empty_frames = flags.iter().map(|&b| b == 1).collect();
    let mut block = |n: usize, what: &str| -> Result<Vec<f64>> {
        Ok(r.f32_vec(frames * n, what)?.into_iter().map(f64::from).collect())
    };
    let range = block(nr, "range")?;
    let doppler = block(nd, "doppler")?;
    let azimuth = block(na, "azimuth")?;
    let elevation = block(na, "elevation")?;
    r.finish()?;
    Ok(SpectrogramSet {
        frames,
        range,
        doppler,
        azimuth,
        elevation,
        range_step,
        doppler_step,
        angles_deg,
        empty_frames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radar::RadarConfig;

    fn small() -> SpectrogramSet {
        SpectrogramSet {
            frames: 2,
            range: vec![1.0, 2.0, 3.0, 4.0],
            doppler: vec![0.5, 0.25, 0.0, 1.5],
            azimuth: vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            elevation: vec![2.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            range_step: 0.03,
            doppler_step: 0.2,
            angles_deg: vec![-1.0, 0.0, 1.0],
            empty_frames: vec![false, true],
        }
    }

    #[test]
    fn binary_round_trip() {
        let s = small();
        let mut buf = Vec::new();
        write_spectrograms(&s, &mut buf).unwrap();
        assert_eq!(read_spectrograms(&buf).unwrap(), s);
        assert!(matches!(read_spectrograms(&buf[..buf.len() - 2]), Err(Error::Format { .. })));
        let mut bad = buf.clone();
        bad[3] = b'0';
        assert!(matches!(read_spectrograms(&bad), Err(Error::Format { offset: 0, .. })));
    }

    #[test]
    fn csv_rows() {
        let mut out = Vec::new();
        write_spectrograms_csv(&small(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("frame,empty,range_0,range_1,doppler_0"));
        assert_eq!(lines[2], "1,1,3,4,0,1.5,0,0,0,0,0,0");
    }

    #[test]
    fn zero_cube_is_flagged() {
        let cube = FrameCube::zeros(RadarConfig::default(), 3).unwrap();
        let s = spectrograms(&cube, &BeamformingGrid::default()).unwrap();
        assert_eq!(s.empty_frames, vec![true; 3]);
        assert!(s.azimuth.iter().all(|&v| v == 0.0));
        assert_eq!((s.range_bins(), s.doppler_bins(), s.angle_bins()), (32, 32, 91));
        assert!((s.range_step - 0.03).abs() < 1e-3);
        assert_eq!(s.doppler_axis()[16], 0.0);
    }
}
