//! FFT baseline: range-Doppler maps, marginal range and Doppler
//! spectrograms, and two-element beamforming at the strongest cell.

mod beamform;
mod fft;
mod rdi;
mod spectrogram;

pub use beamform::{beamform, beamform_counted, pair_response, BeamformOutput, BeamformingGrid};
pub use fft::{fft_shift, hann, FftPlan};
pub use rdi::{marginalize, marginalize_counted, range_doppler, range_doppler_counted, RangeDopplerImage, RdiCube};
pub use spectrogram::{
    read_spectrograms, spectrograms, spectrograms_counted, write_spectrograms, write_spectrograms_csv, SpectrogramSet,
    SPECTROGRAM_MAGIC,
};
