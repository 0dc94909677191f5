use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::conventional::{spectrograms_counted, BeamformingGrid};
use crate::error::{Error, Result};
use crate::harness::SCHEMA_VERSION;
use crate::ops::OpCount;
use crate::radar::{FrameCube, RadarConfig};
use crate::scene::{synthesize_cube, SimNoise, Trajectory};
use crate::timeseries::{extract_features_counted, FeatureConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub chirps: Vec<usize>,
    pub samples: Vec<usize>,
    /// Timed runs per grid point and pipeline.
    pub repetitions: usize,
    /// Frames per timed recording.
    pub frames: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            chirps: vec![16, 32, 64, 128],
            samples: vec![32, 64, 128, 256],
            repetitions: 30,
            frames: 4,
        }
    }
}

/// Wall-clock summary in seconds per frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
    pub runs: usize,
}

impl TimingStats {
    pub fn from_samples(mut v: Vec<f64>) -> Self {
        v.sort_by(|a, b| a.total_cmp(b));
        let q = |p: f64| {
            let x = p * (v.len() - 1) as f64;
            let (i, t) = (x.floor() as usize, x - x.floor());
            v[i] + (v[(i + 1).min(v.len() - 1)] - v[i]) * t
        };
        TimingStats {
            median: q(0.5),
            q1: q(0.25),
            q3: q(0.75),
            min: v[0],
            max: v[v.len() - 1],
            runs: v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchPoint {
    pub chirps: usize,
    pub samples: usize,
    /// Counted operations per frame.
    pub timeseries_ops: OpCount,
    pub fft_ops: OpCount,
    pub timeseries_time: TimingStats,
    pub fft_time: TimingStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares fit of `ln y` against `ln x`.
pub fn fit_loglog(points: &[(f64, f64)]) -> SlopeFit {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    SlopeFit {
        slope,
        intercept: my - slope * mx,
        r_squared: if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slopes {
    /// Complex multiply-accumulates.
    pub timeseries_macs: SlopeFit,
    pub fft_macs: SlopeFit,
    /// All scalar operations.
    pub timeseries_total: SlopeFit,
    pub fft_total: SlopeFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineInfo {
    pub os: String,
    pub arch: String,
    pub logical_cpus: usize,
    pub timing_threads: usize,
}

impl MachineInfo {
    pub fn current() -> Self {
        MachineInfo {
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            logical_cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
            timing_threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub machine: MachineInfo,
    pub config: BenchConfig,
    pub points: Vec<BenchPoint>,
    pub slopes: Slopes,
    pub total_seconds: f64,
}

impl BenchReport {
    pub fn point(&self, chirps: usize, samples: usize) -> Option<&BenchPoint> {
        self.points.iter().find(|p| p.chirps == chirps && p.samples == samples)
    }
}

/// Default radar with `chirps x samples` per frame; the chirp duration
/// follows `samples` at the fixed ADC rate.
pub fn bench_radar(chirps: usize, samples: usize) -> RadarConfig {
    RadarConfig {
        chirps_per_frame: chirps,
        samples_per_chirp: samples,
        ..RadarConfig::default()
    }
}

/// Slowly receding point target a quarter of the way to the range limit,
/// with thermal noise and frame phase but no clutter reflector (which sits
/// beyond the range limit of the smallest grid points).
pub fn bench_cube(config: &RadarConfig, frames: usize, seed: u64) -> Result<FrameCube> {
    let r0 = 0.25 * config.max_range();
    let traj = Trajectory::sample(config, frames, |t| [([0.01, 0.02, r0 + 0.05 * t], 1.0)])?;
    let noise = SimNoise {
        clutter_amplitude: 0.0,
        ..SimNoise::default()
    };
    synthesize_cube(&traj, config, &noise, seed)
}

fn time_per_frame(reps: usize, frames: usize, mut f: impl FnMut() -> Result<()>) -> Result<TimingStats> {
    let mut samples = Vec::with_capacity(reps);
    f()?;
    for _ in 0..reps {
        let start = Instant::now();
        f()?;
        samples.push(start.elapsed().as_secs_f64() / frames as f64);
    }
    Ok(TimingStats::from_samples(samples))
}

fn per_frame(ops: OpCount, frames: usize) -> OpCount {
    let f = frames as u64;
    OpCount {
        complex_macs: ops.complex_macs / f,
        muls: ops.muls / f,
        adds: ops.adds / f,
        transcendentals: ops.transcendentals / f,
        comparisons: ops.comparisons / f,
    }
}

/// Counts and times both pipelines over the `(N, M)` grid. Timing runs on a
/// single thread.
pub fn bench_complexity(config: &BenchConfig) -> Result<BenchReport> {
    if config.chirps.is_empty() || config.samples.is_empty() {
        return Err(Error::Validation("benchmark grid is empty".into()));
    }
    if let Some(v) = config.chirps.iter().chain(&config.samples).find(|v| !v.is_power_of_two()) {
        return Err(Error::Config(format!("grid value {v} is not a power of two")));
    }
    if config.repetitions == 0 || config.frames == 0 {
        return Err(Error::Validation("repetitions and frames must be positive".into()));
    }
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let grid = BeamformingGrid::default();
    let features = FeatureConfig::default();
    let mut points = Vec::new();
    for &n in &config.chirps {
        for &m in &config.samples {
            let radar = bench_radar(n, m);
            radar.validate()?;
            let cube = bench_cube(&radar, config.frames, (n * 1000 + m) as u64)?;
            let mut ts_ops = OpCount::new();
            extract_features_counted(&cube, &features, &mut ts_ops)?;
            let mut fft_ops = OpCount::new();
            spectrograms_counted(&cube, &grid, &mut fft_ops)?;
            let (ts_time, fft_time) = pool.install(|| -> Result<_> {
                let ts = time_per_frame(config.repetitions, config.frames, || {
                    extract_features_counted(&cube, &features, &mut OpCount::new()).map(|_| ())
                })?;
                let fft = time_per_frame(config.repetitions, config.frames, || {
                    spectrograms_counted(&cube, &grid, &mut OpCount::new()).map(|_| ())
                })?;
                Ok((ts, fft))
            })?;
            points.push(BenchPoint {
                chirps: n,
                samples: m,
                timeseries_ops: per_frame(ts_ops, config.frames),
                fft_ops: per_frame(fft_ops, config.frames),
                timeseries_time: ts_time,
                fft_time,
            });
        }
    }
    let fit = |f: &dyn Fn(&BenchPoint) -> u64| {
        let pts: Vec<(f64, f64)> = points
            .iter()
            .map(|p| ((p.chirps * p.samples) as f64, f(p) as f64))
            .collect();
        fit_loglog(&pts)
    };
    let slopes = Slopes {
        timeseries_macs: fit(&|p| p.timeseries_ops.complex_macs),
        fft_macs: fit(&|p| p.fft_ops.complex_macs),
        timeseries_total: fit(&|p| p.timeseries_ops.total()),
        fft_total: fit(&|p| p.fft_ops.total()),
    };
    Ok(BenchReport {
        schema_version: SCHEMA_VERSION,
        machine: MachineInfo::current(),
        config: config.clone(),
        points,
        slopes,
        total_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn write_bench_csv(report: &BenchReport, out: &mut impl Write) -> Result<()> {
    writeln!(
        out,
        "chirps,samples,ts_complex_macs,ts_total_ops,fft_complex_macs,fft_total_ops,ts_median_s,fft_median_s"
    )?;
    for p in &report.points {
        writeln!(
            out,
            "{},{},{},{},{},{},{:e},{:e}",
            p.chirps,
            p.samples,
            p.timeseries_ops.complex_macs,
            p.timeseries_ops.total(),
            p.fft_ops.complex_macs,
            p.fft_ops.total(),
            p.timeseries_time.median,
            p.fft_time.median
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_fit() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (2f64.powi(i), 3.0 * 2f64.powi(i))).collect();
        let f = fit_loglog(&pts);
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn quartiles() {
        let s = TimingStats::from_samples(vec![5.0, 1.0, 3.0, 2.0, 4.0]);
        assert_eq!((s.median, s.q1, s.q3, s.min, s.max), (3.0, 2.0, 4.0, 1.0, 5.0));
    }

    #[test]
    fn rejects_bad_grid() {
        let mut c = BenchConfig {
            chirps: vec![24],
            samples: vec![64],
            repetitions: 1,
            frames: 1,
        };
        assert!(matches!(bench_complexity(&c), Err(Error::Config(_))));
        c.chirps.clear();
        assert!(bench_complexity(&c).is_err());
    }

    #[test]
    fn doubling_ratio() {
        let c = BenchConfig {
            chirps: vec![32, 64],
            samples: vec![64, 128],
            repetitions: 1,
            frames: 1,
        };
        let r = bench_complexity(&c).unwrap();
        let a = r.point(32, 64).unwrap();
        let b = r.point(64, 128).unwrap();
        assert_eq!(a.timeseries_ops.complex_macs, 3 * 32 * 64);
        assert_eq!(b.timeseries_ops.complex_macs as f64 / a.timeseries_ops.complex_macs as f64, 4.0);
        assert!(b.fft_ops.complex_macs as f64 / a.fft_ops.complex_macs as f64 > 4.0);
    }
}
