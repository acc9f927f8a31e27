//! Windowed rate estimation.
//!
//! Each window is normalized to zero mean, then processed once per vital kind: band-pass
//! filter from zero initial conditions, Hanning taper, FFT, and the strongest in-band bin
//! is converted to BPM.

use std::fmt;

use super::design::{design_bandpass, ChebyshevDesign};
use super::filter::FilterCoefficients;
use super::spectrum::{apply_window, band_bins, fft, hanning_window, peak_in_band};
use crate::error::{Error, Result};
use crate::io::Trace;
use crate::metrics::{VitalsReport, WindowEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VitalKind {
    Breathing,
    Heart,
}

impl VitalKind {
    pub const ALL: [VitalKind; 2] = [VitalKind::Breathing, VitalKind::Heart];

    pub fn as_str(self) -> &'static str {
        match self {
            VitalKind::Breathing => "breathing",
            VitalKind::Heart => "heart",
        }
    }
}

impl fmt::Display for VitalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rate band of interest, in beats (or breaths) per minute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    pub low_bpm: f64,
    pub high_bpm: f64,
    pub kind: VitalKind,
}

impl BandSpec {
    pub fn new(low_bpm: f64, high_bpm: f64, kind: VitalKind) -> Result<Self> {
        if !(low_bpm.is_finite() && high_bpm.is_finite() && low_bpm > 0.0 && low_bpm < high_bpm) {
            return Err(Error::Validation(format!(
                "{kind} band {low_bpm}-{high_bpm} BPM must satisfy 0 < low < high"
            )));
        }
        Ok(Self {
            low_bpm,
            high_bpm,
            kind,
        })
    }

    /// Adult breathing, 10-60 breaths per minute.
    pub fn breathing() -> Self {
        Self {
            low_bpm: 10.0,
            high_bpm: 60.0,
            kind: VitalKind::Breathing,
        }
    }

    /// Adult heart rate, 30-200 beats per minute.
    pub fn heart() -> Self {
        Self {
            low_bpm: 30.0,
            high_bpm: 200.0,
            kind: VitalKind::Heart,
        }
    }

    pub fn low_hz(&self) -> f64 {
        self.low_bpm / 60.0
    }

    pub fn high_hz(&self) -> f64 {
        self.high_bpm / 60.0
    }

    pub fn contains_bpm(&self, bpm: f64) -> bool {
        (self.low_bpm..=self.high_bpm).contains(&bpm)
    }
}

/// Everything [`estimate_vitals`] needs besides the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub window_size: usize,
    /// Fraction of a window shared with the next one, in `[0, 1)`.
    pub window_overlap: f64,
    pub sampling_rate: f64,
    pub breathing_band: BandSpec,
    pub heart_band: BandSpec,
    pub breathing_filter: FilterCoefficients,
    pub heart_filter: FilterCoefficients,
    /// A window is confident when its peak is at least this multiple of the band median.
    pub confidence_ratio: f64,
}

pub const DEFAULT_SAMPLING_RATE: f64 = 100.0;
pub const DEFAULT_WINDOW_SIZE: usize = 2048;
pub const DEFAULT_CONFIDENCE_RATIO: f64 = 10.0;
const ROUNDING_FLOOR: f64 = 1e3;

impl PipelineConfig {
    /// Configuration with Chebyshev II filters designed from the band edges.
    pub fn designed(
        sampling_rate: f64,
        window_size: usize,
        breathing_band: BandSpec,
        heart_band: BandSpec,
        design: &ChebyshevDesign,
    ) -> Result<Self> {
        let breathing_filter =
            design_bandpass(design, breathing_band.low_hz(), breathing_band.high_hz(), sampling_rate)?;
        let heart_filter = design_bandpass(design, heart_band.low_hz(), heart_band.high_hz(), sampling_rate)?;
        let config = Self {
            window_size,
            window_overlap: 0.0,
            sampling_rate,
            breathing_band,
            heart_band,
            breathing_filter,
            heart_filter,
            confidence_ratio: DEFAULT_CONFIDENCE_RATIO,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_window_size(mut self, window_size: usize) -> Result<Self> {
        self.window_size = window_size;
        self.validate()?;
        Ok(self)
    }

    pub fn with_overlap(mut self, overlap: f64) -> Result<Self> {
        self.window_overlap = overlap;
        self.validate()?;
        Ok(self)
    }

    pub fn band(&self, kind: VitalKind) -> &BandSpec {
        match kind {
            VitalKind::Breathing => &self.breathing_band,
            VitalKind::Heart => &self.heart_band,
        }
    }

    pub fn filter(&self, kind: VitalKind) -> &FilterCoefficients {
        match kind {
            VitalKind::Breathing => &self.breathing_filter,
            VitalKind::Heart => &self.heart_filter,
        }
    }

    /// Samples between consecutive window starts.
    pub fn stride(&self) -> usize {
        ((self.window_size as f64 * (1.0 - self.window_overlap)).round() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sampling_rate.is_finite() && self.sampling_rate > 0.0) {
            return Err(Error::Validation(format!(
                "sampling rate must be positive, got {}",
                self.sampling_rate
            )));
        }
        if self.window_size < 2 || !self.window_size.is_power_of_two() {
            return Err(Error::Validation(format!(
                "window size {} must be a power of two >= 2",
                self.window_size
            )));
        }
        if !(0.0..1.0).contains(&self.window_overlap) {
            return Err(Error::Validation(format!(
                "window overlap {} must lie in [0, 1)",
                self.window_overlap
            )));
        }
        if !(self.confidence_ratio.is_finite() && self.confidence_ratio >= 0.0) {
            return Err(Error::Validation("confidence ratio must be non-negative".into()));
        }
        for kind in VitalKind::ALL {
            let band = self.band(kind);
            if band.kind != kind {
                return Err(Error::Validation(format!("{kind} band is tagged {}", band.kind)));
            }
            BandSpec::new(band.low_bpm, band.high_bpm, kind)?;
            if band.high_hz() >= self.sampling_rate / 2.0 {
                return Err(Error::Validation(format!(
                    "{kind} band upper edge {} Hz is not below Nyquist {} Hz",
                    band.high_hz(),
                    self.sampling_rate / 2.0
                )));
            }
            band_bins(band, self.window_size, self.sampling_rate)?;
        }
        Ok(())
    }
}

impl Default for PipelineConfig {
    /// 100 Hz, 2048-sample windows, default bands, designed filters.
    fn default() -> Self {
        Self::designed(
            DEFAULT_SAMPLING_RATE,
            DEFAULT_WINDOW_SIZE,
            BandSpec::breathing(),
            BandSpec::heart(),
            &ChebyshevDesign::default(),
        )
        .expect("default pipeline configuration is valid")
    }
}

/// Width of one FFT bin in BPM, `fs / N * 60`.
pub fn bpm_resolution(config: &PipelineConfig) -> f64 {
    config.sampling_rate / config.window_size as f64 * 60.0
}

/// Estimate breathing and heart rates window by window.
///
/// The trace ground truth, when present, becomes the report's reference.
pub fn estimate_vitals(trace: &Trace, config: &PipelineConfig) -> Result<VitalsReport> {
    config.validate()?;
    let fs = config.sampling_rate;
    if (trace.sampling_rate() - fs).abs() > 1e-9 * fs {
        return Err(Error::Validation(format!(
            "trace sampled at {} Hz but the pipeline expects {fs} Hz",
            trace.sampling_rate()
        )));
    }
    let n = config.window_size;
    let samples = trace.samples();
    if samples.len() < n {
        return Err(Error::TraceTooShort {
            samples: samples.len(),
            window: n,
        });
    }

    let taper = hanning_window(n)?;
    let stride = config.stride();
    let mut estimates = Vec::new();
    for (index, start) in (0..=samples.len() - n).step_by(stride).enumerate() {
        let raw = &samples[start..start + n];
        // spectral magnitudes below this are rounding residue of the mean removal
        let floor = ROUNDING_FLOOR * n as f64 * f64::EPSILON * raw.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        let segment = normalize(raw);
        for kind in VitalKind::ALL {
            let filtered = config.filter(kind).filter(&segment)?;
            if filtered.iter().any(|x| !x.is_finite()) {
                return Err(Error::Numerical(format!(
                    "filter `{}` diverged in window {index}",
                    config.filter(kind).label()
                )));
            }
            let spectrum = fft(&apply_window(&taper, &filtered)?)?;
            let peak = peak_in_band(&spectrum, config.band(kind), fs)?;
            let confident = peak.magnitude > floor && peak.magnitude >= config.confidence_ratio * peak.median_magnitude;
            estimates.push(WindowEstimate {
                window: index,
                start_time: start as f64 / fs,
                kind,
                bin: peak.bin,
                bpm: peak.frequency * 60.0,
                magnitude: peak.magnitude,
                confident,
            });
        }
    }

    let mut report = VitalsReport::from_windows(estimates, bpm_resolution(config), n as f64 / fs);
    if let Some(truth) = trace.truth() {
        report.set_reference(VitalKind::Breathing, truth.breathing_bpm)?;
        report.set_reference(VitalKind::Heart, truth.heart_bpm)?;
    }
    Ok(report)
}

/// Remove the window mean so the filter does not start on a large DC step.
fn normalize(segment: &[f64]) -> Vec<f64> {
    let mean = segment.iter().sum::<f64>() / segment.len() as f64;
    segment.iter().map(|x| x - mean).collect()
}
