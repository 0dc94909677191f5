use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{preprocess, MachineInfo, Normalizer, Pipeline, TimingStats, SCHEMA_VERSION};
use crate::micronet::{load_checkpoint, save_checkpoint, Model};
use crate::radar::GestureRecord;

/// Everything besides the weights needed to run a trained network on raw
/// recordings; stored in the checkpoint header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub pipeline: Pipeline,
    pub spectrogram_width: usize,
    pub normalizer: Normalizer,
}

pub fn save_classifier(model: &Model<f32>, meta: &CheckpointMeta, path: impl AsRef<Path>) -> Result<()> {
    save_checkpoint(model, &serde_json::to_value(meta)?, path)
}

pub fn load_classifier(path: impl AsRef<Path>) -> Result<(Model<f32>, CheckpointMeta)> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::Manifest(format!("checkpoint {} not found", path.display())));
    }
    let (model, extra) = load_checkpoint::<f32>(path)?;
    let meta: CheckpointMeta =
        serde_json::from_value(extra).map_err(|e| Error::Manifest(format!("checkpoint lacks preprocessing metadata: {e}")))?;
    Ok((model, meta))
}

/// Raw recording to class probabilities.
pub fn classify(record: &GestureRecord, model: &Model<f32>, meta: &CheckpointMeta) -> Result<Vec<f32>> {
    let (mut x, _) = preprocess(record, meta.pipeline, meta.spectrogram_width)?;
    meta.normalizer.apply(&mut x);
    model.forward(&x, 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub schema_version: u32,
    pub pipeline: Pipeline,
    pub frames: usize,
    pub duration_seconds: f64,
    /// Seconds per recording.
    pub preprocessing: TimingStats,
    /// Seconds per single-sample forward pass.
    pub inference: TimingStats,
    pub machine: MachineInfo,
}

/// Median-of-`runs` timing of preprocessing one recording and classifying it.
pub fn measure_latency(record: &GestureRecord, model: &Model<f32>, meta: &CheckpointMeta, runs: usize) -> Result<LatencyReport> {
    if record.cube.frames() == 0 {
        return Err(Error::Validation("recording has no frames".into()));
    }
    if runs == 0 {
        return Err(Error::Validation("need at least one timed run".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        let (mut x, _) = preprocess(record, meta.pipeline, meta.spectrogram_width)?;
        meta.normalizer.apply(&mut x);
        model.forward(&x, 1)?;
        let mut pre = Vec::with_capacity(runs);
        let mut inf = Vec::with_capacity(runs);
        for _ in 0..runs {
            let t = Instant::now();
            let (mut y, _) = preprocess(record, meta.pipeline, meta.spectrogram_width)?;
            meta.normalizer.apply(&mut y);
            pre.push(t.elapsed().as_secs_f64());
            let t = Instant::now();
            std::hint::black_box(model.forward(&y, 1)?);
            inf.push(t.elapsed().as_secs_f64());
        }
        Ok(LatencyReport {
            schema_version: SCHEMA_VERSION,
            pipeline: meta.pipeline,
            frames: record.cube.frames(),
            duration_seconds: record.duration(),
            preprocessing: TimingStats::from_samples(pre),
            inference: TimingStats::from_samples(inf),
            machine: MachineInfo::current(),
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::InputLayout;
    use crate::micronet::build_1d_model;
    use crate::radar::{FrameCube, RadarConfig};

    fn meta() -> CheckpointMeta {
        CheckpointMeta {
            pipeline: Pipeline::Timeseries,
            spectrogram_width: 48,
            normalizer: Normalizer::fit(
                [&[0.0f32, 1.0, 2.0, 3.0][..]],
                InputLayout {
                    channels: 4,
                    height: 1,
                    width: 1,
                },
            )
            .unwrap(),
        }
    }

    #[test]
    fn empty_recording_is_rejected() {
        let rec = GestureRecord::new(FrameCube::zeros(RadarConfig::default(), 0).unwrap(), 0, 0).unwrap();
        let model = Model::<f32>::new(&build_1d_model(1920).unwrap()).unwrap();
        assert!(matches!(measure_latency(&rec, &model, &meta(), 30), Err(Error::Validation(_))));
    }

    #[test]
    fn classifier_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.mnc");
        let model = Model::<f32>::new(&build_1d_model(1920).unwrap().with_seed(3)).unwrap();
        save_classifier(&model, &meta(), &path).unwrap();
        let (back, m) = load_classifier(&path).unwrap();
        assert_eq!(m, meta());
        assert_eq!(back.flat_parameters(), model.flat_parameters());
        assert!(matches!(load_classifier(dir.path().join("none")), Err(Error::Manifest(_))));
    }
}
