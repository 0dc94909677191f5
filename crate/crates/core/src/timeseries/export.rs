//! Feature files.
//!
//! CSV: header `k,rel_range,azimuth_acc,elevation_acc,magnitude`, one row per
//! chirp.
//!
//! FTS1 binary, little-endian:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "FTS1"
//!      4     4  u32 K
//!      8     8  f64 sample period (s)
//!     16  16*K  f32 blocks: rel_range, azimuth_acc, elevation_acc, magnitude
//! ```

use std::io::Write;

use crate::binio::{Reader, Writer};
use crate::error::{Error, Result};
use crate::timeseries::TimeSeriesFeatures;

pub const FEATURES_MAGIC: &[u8; 4] = b"FTS1";

pub fn write_features_csv(features: &TimeSeriesFeatures, out: &mut impl Write) -> Result<()> {
    writeln!(out, "k,rel_range,azimuth_acc,elevation_acc,magnitude")?;
    for k in 0..features.len() {
        writeln!(
            out,
            "{k},{},{},{},{}",
            features.rel_range[k], features.azimuth_acc[k], features.elevation_acc[k], features.magnitude[k]
        )?;
    }
    Ok(())
}

/// Writes FTS1. Values are stored as f32.
pub fn write_features(features: &TimeSeriesFeatures, out: &mut impl Write) -> Result<usize> {
    let k = features.len();
    if features.channels().iter().any(|c| c.len() != k) {
        return Err(Error::Shape("feature channels differ in length".into()));
    }
    let k32 = u32::try_from(k).map_err(|_| Error::Shape(format!("{k} samples do not fit a u32")))?;
    let mut w = Writer::new();
    w.bytes(FEATURES_MAGIC);
    w.u32(k32);
    w.f64(features.sample_period);
    for ch in features.channels() {
        for &v in ch {
            w.f32(v as f32);
        }
    }
    out.write_all(&w.buf)?;
    Ok(w.buf.len())
}

pub fn read_features(data: &[u8]) -> Result<TimeSeriesFeatures> {
    let mut r = Reader::new(data);
    r.magic(FEATURES_MAGIC)?;
    let k = r.u32("sample count")? as usize;
    let period_at = r.offset();
    let sample_period = r.f64("sample period")?;
    if !(sample_period.is_finite() && sample_period > 0.0) {
        return Err(Error::format(period_at, format!("sample period {sample_period} is not positive")));
    }
    let mut block = |what: &str| -> Result<Vec<f64>> {
        Ok(r.f32_vec(k, what)?.into_iter().map(f64::from).collect())
    };
    let rel_range = block("rel_range")?;
    let azimuth_acc = block("azimuth_acc")?;
    let elevation_acc = block("elevation_acc")?;
    let magnitude = block("magnitude")?;
    r.finish()?;
    Ok(TimeSeriesFeatures {
        rel_range,
        azimuth_acc,
        elevation_acc,
        magnitude,
        sample_period,
    })
}
