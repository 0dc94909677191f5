use serde::{Deserialize, Serialize};

use crate::conventional::{spectrograms, BeamformingGrid, SpectrogramSet};
use crate::error::{Error, Result};
use crate::radar::GestureRecord;
use crate::timeseries::{extract_features, TimeSeriesFeatures};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Timeseries,
    Spectrogram,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Timeseries => "timeseries",
            Pipeline::Spectrogram => "spectrogram",
        }
    }
}

impl std::str::FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "timeseries" => Ok(Pipeline::Timeseries),
            "spectrogram" => Ok(Pipeline::Spectrogram),
            other => Err(Error::Validation(format!("unknown pipeline {other:?}"))),
        }
    }
}

/// Default common width of the four stacked spectrogram channels.
pub const SPECTROGRAM_WIDTH: usize = 48;

/// Network input layout: `channels x height x width`, flattened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputLayout {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
}

impl InputLayout {
    pub fn len(&self) -> usize {
        self.channels * self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The four feature series stacked channel-major: rel_range, azimuth,
/// elevation, magnitude.
pub fn timeseries_input(features: &TimeSeriesFeatures) -> (Vec<f32>, InputLayout) {
    let k = features.len();
    let mut out = Vec::with_capacity(4 * k);
    for ch in features.channels() {
        out.extend(ch.iter().map(|&v| v as f32));
    }
    (
        out,
        InputLayout {
            channels: 4,
            height: 1,
            width: k,
        },
    )
}

/// Range, Doppler, azimuth and elevation maps, each `log1p`-compressed and
/// linearly resampled to `width` columns, stacked as four `F x width` channels.
pub fn spectrogram_input(set: &SpectrogramSet, width: usize) -> Result<(Vec<f32>, InputLayout)> {
    if width < 2 {
        return Err(Error::Parameter(format!("spectrogram width {width} below 2")));
    }
    let f = set.frames;
    let mut out = Vec::with_capacity(4 * f * width);
    let maps = [
        (&set.range, set.range_bins()),
        (&set.doppler, set.doppler_bins()),
        (&set.azimuth, set.angle_bins()),
        (&set.elevation, set.angle_bins()),
    ];
    for (map, cols) in maps {
        for row in map.chunks_exact(cols.max(1)).take(f) {
            out.extend(resample(row, width).into_iter().map(|v| v.ln_1p() as f32));
        }
    }
    Ok((
        out,
        InputLayout {
            channels: 4,
            height: f,
            width,
        },
    ))
}

/// Linear interpolation of `row` onto `width` evenly spaced points spanning
/// the same extent.
pub fn resample(row: &[f64], width: usize) -> Vec<f64> {
    let n = row.len();
    if n == 0 {
        return vec![0.0; width];
    }
    if n == 1 || width == 1 {
        return vec![row[0]; width];
    }
    (0..width)
        .map(|j| {
            let x = j as f64 * (n - 1) as f64 / (width - 1) as f64;
            let i = (x.floor() as usize).min(n - 2);
            let t = x - i as f64;
            row[i] * (1.0 - t) + row[i + 1] * t
        })
        .collect()
}

/// Network input of one recording for the given pipeline.
pub fn preprocess(record: &GestureRecord, pipeline: Pipeline, width: usize) -> Result<(Vec<f32>, InputLayout)> {
    if record.cube.frames() == 0 {
        return Err(Error::Validation("recording has no frames".into()));
    }
    match pipeline {
        Pipeline::Timeseries => Ok(timeseries_input(&extract_features(&record.cube)?)),
        Pipeline::Spectrogram => spectrogram_input(&spectrograms(&record.cube, &BeamformingGrid::default())?, width),
    }
}

/// Per-channel z-score statistics fitted on training inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalizer {
    /// `samples` are flattened inputs of `layout`; statistics pool every
    /// position of a channel across all samples.
    pub fn fit<'a>(samples: impl IntoIterator<Item = &'a [f32]>, layout: InputLayout) -> Result<Self> {
        let per_channel = layout.height * layout.width;
        let mut sum = vec![0.0f64; layout.channels];
        let mut sq = vec![0.0f64; layout.channels];
        let mut count = 0usize;
        for s in samples {
            if s.len() != layout.len() {
                return Err(Error::Shape(format!("sample of {} values for layout of {}", s.len(), layout.len())));
            }
            for (c, chunk) in s.chunks_exact(per_channel).enumerate() {
                for &v in chunk {
                    sum[c] += v as f64;
                    sq[c] += (v as f64) * (v as f64);
                }
            }
            count += per_channel;
        }
        if count == 0 {
            return Err(Error::Validation("no samples to fit normalisation on".into()));
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / count as f64).collect();
        let std = sq
            .iter()
            .zip(&mean)
            .map(|(q, m)| {
                let sd = (q / count as f64 - m * m).max(0.0).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Normalizer { mean, std })
    }

    pub fn apply(&self, sample: &mut [f32]) {
        let per_channel = sample.len() / self.mean.len();
        for (c, chunk) in sample.chunks_exact_mut(per_channel).enumerate() {
            let (m, s) = (self.mean[c], self.std[c]);
            for v in chunk {
                *v = ((*v as f64 - m) / s) as f32;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resample_endpoints_and_midpoints() {
        let row = [0.0, 1.0, 4.0];
        assert_eq!(resample(&row, 5), vec![0.0, 0.5, 1.0, 2.5, 4.0]);
        assert_eq!(resample(&row, 3), row.to_vec());
        assert_eq!(resample(&[2.0], 4), vec![2.0; 4]);
    }

    #[test]
    fn normalizer_zero_mean_unit_std() {
        let layout = InputLayout {
            channels: 2,
            height: 1,
            width: 2,
        };
        let a = [1.0f32, 3.0, 10.0, 10.0];
        let b = [5.0f32, 7.0, 10.0, 10.0];
        let n = Normalizer::fit([&a[..], &b[..]], layout).unwrap();
        assert_eq!(n.mean, vec![4.0, 10.0]);
        assert_eq!(n.std[1], 1.0);
        let mut x = a;
        n.apply(&mut x);
        assert!((x[0] + 3.0 / 5f32.sqrt()).abs() < 1e-6);
        assert_eq!(x[2], 0.0);
    }

    #[test]
    fn pipeline_names_parse() {
        assert_eq!("timeseries".parse::<Pipeline>().unwrap(), Pipeline::Timeseries);
        assert!("fft".parse::<Pipeline>().is_err());
    }
}
