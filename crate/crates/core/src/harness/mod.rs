//! Dataset orchestration, experiments, complexity benchmarks and latency
//! measurement; the command-line tool is a thin layer over this module.

mod bench;
mod experiment;
mod latency;
mod manifest;
mod preprocess;

pub use bench::{
    bench_complexity, bench_cube, bench_radar, fit_loglog, write_bench_csv, BenchConfig, BenchPoint, BenchReport,
    MachineInfo, SlopeFit, Slopes, TimingStats,
};
pub use experiment::{
    model_for, prepare, prepare_source, reference_for, run_experiment, run_prepared, split_and_normalize,
    DatasetSummary, ExperimentOutcome, ExperimentReport, PreparedData, PreparedRecord, Timing, REFERENCE_1D,
    REFERENCE_2D,
};
pub use latency::{classify, load_classifier, measure_latency, save_classifier, CheckpointMeta, LatencyReport};
pub use manifest::{
    DatasetEntry, DatasetManifest, DatasetSource, ExperimentManifest, SplitRule, SCHEMA_VERSION,
};
pub use preprocess::{
    preprocess, resample, spectrogram_input, timeseries_input, InputLayout, Normalizer, Pipeline, SPECTROGRAM_WIDTH,
};
