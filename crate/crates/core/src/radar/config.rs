use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// L-shaped receiver layout in wavelengths, antennas 1..3 in order.
///
/// Antenna 3 sits at the phase reference (co-located with the transmitter);
/// antenna 1 is half a wavelength from it along the azimuth axis and antenna 2
/// half a wavelength along the elevation axis. The offsets point away from
/// positive angles so that `phase(1) - phase(3) = +pi sin(azimuth)`.
pub const DEFAULT_ANTENNAS: [[f64; 2]; 3] = [[-0.5, 0.0], [0.0, -0.5], [0.0, 0.0]];

/// Acquisition parameters of a single-TX FMCW radar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarConfig {
    /// Chirp start frequency (Hz).
    pub f_min: f64,
    /// Chirp stop frequency (Hz).
    pub f_max: f64,
    /// Pulse repetition time between chirp starts (s).
    pub t_prt: f64,
    pub chirps_per_frame: usize,
    pub samples_per_chirp: usize,
    /// ADC sample rate (Hz).
    pub adc_rate: f64,
    /// Frames per second.
    pub frame_rate: f64,
    pub rx_count: usize,
    /// Receive antenna positions `(azimuth, elevation)` in wavelengths, 0-based.
    pub antenna_positions: Vec<[f64; 2]>,
}

impl Default for RadarConfig {
    fn default() -> Self {
        RadarConfig {
            f_min: 58.0e9,
            f_max: 63.0e9,
            t_prt: 0.39e-3,
            chirps_per_frame: 32,
            samples_per_chirp: 64,
            adc_rate: 2.0e6,
            frame_rate: 30.0,
            rx_count: 3,
            antenna_positions: DEFAULT_ANTENNAS.to_vec(),
        }
    }
}

impl RadarConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.f_min,
            self.f_max,
            self.t_prt,
            self.adc_rate,
            self.frame_rate,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("non-finite parameter".into()));
        }
        if !(self.f_min > 0.0 && self.f_max > self.f_min) {
            return Err(Error::Config(format!(
                "need 0 < f_min < f_max, got {} / {}",
                self.f_min, self.f_max
            )));
        }
        if self.chirps_per_frame == 0 || self.samples_per_chirp == 0 || self.rx_count == 0 {
            return Err(Error::Config("counts must be at least 1".into()));
        }
        if !(self.adc_rate > 0.0 && self.frame_rate > 0.0 && self.t_prt > 0.0) {
            return Err(Error::Config("rates and t_prt must be positive".into()));
        }
        if self.t_prt <= self.chirp_duration() {
            return Err(Error::Config(format!(
                "chirp of {} s does not fit inside t_prt {} s",
                self.chirp_duration(),
                self.t_prt
            )));
        }
        if self.antenna_positions.len() != self.rx_count {
            return Err(Error::Config(format!(
                "{} antenna positions for {} receivers",
                self.antenna_positions.len(),
                self.rx_count
            )));
        }
        Ok(())
    }

    /// Wavelength at the chirp center frequency (m).
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.center_frequency()
    }

    pub fn center_frequency(&self) -> f64 {
        0.5 * (self.f_min + self.f_max)
    }

    pub fn bandwidth(&self) -> f64 {
        self.f_max - self.f_min
    }

    /// Sampled chirp duration `M / adc_rate` (s).
    pub fn chirp_duration(&self) -> f64 {
        self.samples_per_chirp as f64 / self.adc_rate
    }

    /// Beat frequency of a scatterer at one-way range `range` (Hz).
    pub fn beat_frequency(&self, range: f64) -> f64 {
        2.0 * range * self.bandwidth() / (SPEED_OF_LIGHT * self.chirp_duration())
    }

    /// Largest range whose beat frequency stays below Nyquist (m).
    pub fn max_range(&self) -> f64 {
        0.5 * self.adc_rate * SPEED_OF_LIGHT * self.chirp_duration() / (2.0 * self.bandwidth())
    }

    /// Range spacing of one fast-time DFT bin (m).
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth())
    }

    /// Radial velocity spacing of one slow-time DFT bin (m/s).
    pub fn velocity_resolution(&self) -> f64 {
        self.wavelength() / (2.0 * self.t_prt * self.chirps_per_frame as f64)
    }

    /// Start time of chirp `n` in frame `f` (s).
    pub fn chirp_time(&self, frame: usize, chirp: usize) -> f64 {
        frame as f64 / self.frame_rate + chirp as f64 * self.t_prt
    }

    /// Antenna position in metres, `(azimuth, elevation, 0)`.
    pub fn antenna_position_m(&self, rx: usize) -> [f64; 3] {
        let lambda = self.wavelength();
        let [x, y] = self.antenna_positions[rx];
        [x * lambda, y * lambda, 0.0]
    }

    /// Frames in a recording of `duration` seconds.
    pub fn frames_for(&self, duration: f64) -> usize {
        (duration * self.frame_rate).round() as usize
    }

    /// Upper bound on the slow-time phase step of a scatterer moving at `speed` (rad).
    pub fn phase_step_bound(&self, speed: f64) -> f64 {
        4.0 * std::f64::consts::PI * speed * self.t_prt / self.wavelength()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RadarConfig::default();
        c.validate().unwrap();
        assert_eq!(c.bandwidth(), 5.0e9);
        assert!((c.chirp_duration() - 32e-6).abs() < 1e-15);
        assert!((c.wavelength() - 4.955e-3).abs() < 1e-6);
        assert_eq!(c.frames_for(2.0), 60);
    }

    #[test]
    fn beat_frequency_at_thirty_centimetres() {
        let c = RadarConfig::default();
        // 2 R BW / (c T) with R = 0.3 m, BW = 5 GHz, T = 32 us.
        let expected = 2.0 * 0.3 * 5.0e9 / (SPEED_OF_LIGHT * 32e-6);
        assert!((c.beat_frequency(0.3) - expected).abs() < 1e-6);
        let bin = c.beat_frequency(0.3) / (c.adc_rate / c.samples_per_chirp as f64);
        assert_eq!(bin.round(), 10.0);
    }

    #[test]
    fn rejects_inverted_band() {
        let c = RadarConfig {
            f_max: 50e9,
            ..RadarConfig::default()
        };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_chirp_longer_than_prt() {
        let c = RadarConfig {
            t_prt: 20e-6,
            ..RadarConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
