//! Band-pass filtering, spectral analysis and the windowed rate estimator.

mod design;
mod filter;
mod pipeline;
mod spectrum;

pub use design::{design_bandpass, ChebyshevDesign, EdgeConvention, MAX_DESIGN_ORDER};
pub use filter::{
    frequency_response, iir_filter, FilterCoefficients, FilterPreset, Stability, StabilityVerdict, PAPER_BREATHING_A,
    PAPER_BREATHING_B, PAPER_HEART_A, PAPER_HEART_B, STABILITY_TOLERANCE,
};
pub use pipeline::{
    bpm_resolution, estimate_vitals, BandSpec, PipelineConfig, VitalKind, DEFAULT_CONFIDENCE_RATIO,
    DEFAULT_SAMPLING_RATE, DEFAULT_WINDOW_SIZE,
};
pub use spectrum::{apply_window, band_bins, fft, hanning_window, peak_in_band, SpectralPeak};
