use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::pipeline::BandSpec;
use crate::error::{Error, Result};

/// Periodic Hanning weights `sin^2(pi m / N)`, `m = 0..N`.
pub fn hanning_window(size: usize) -> Result<Vec<f64>> {
    if size < 2 {
        return Err(Error::Domain(format!("window size must be at least 2, got {size}")));
    }
    let n = size as f64;
    Ok((0..size).map(|m| (PI * m as f64 / n).sin().powi(2)).collect())
}

pub fn apply_window(weights: &[f64], signal: &[f64]) -> Result<Vec<f64>> {
    if weights.len() != signal.len() {
        return Err(Error::LengthMismatch {
            left: weights.len(),
            right: signal.len(),
        });
    }
    Ok(weights.iter().zip(signal).map(|(w, x)| w * x).collect())
}

/// Unscaled forward DFT `Y[k] = sum_m y[m] e^{-j 2 pi k m / N}` of a power-of-two length signal.
pub fn fft(signal: &[f64]) -> Result<Vec<Complex64>> {
    let n = signal.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut buffer: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    Ok(buffer)
}

/// Strongest in-band spectral tone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPeak {
    pub bin: usize,
    pub frequency: f64,
    pub magnitude: f64,
    /// Median magnitude over the band's bins, the reference for the confidence test.
    pub median_magnitude: f64,
}

/// Bins `k` in `[1, N/2]` whose center `k * fs / N` lies inside the band.
pub fn band_bins(band: &BandSpec, len: usize, sampling_rate: f64) -> Result<Vec<usize>> {
    let bins: Vec<usize> = (1..=len / 2)
        .filter(|&k| {
            let bpm = k as f64 * sampling_rate * 60.0 / len as f64;
            bpm >= band.low_bpm && bpm <= band.high_bpm
        })
        .collect();
    if bins.is_empty() {
        return Err(Error::EmptyBand {
            low_bpm: band.low_bpm,
            high_bpm: band.high_bpm,
        });
    }
    Ok(bins)
}

/// Argmax of `|Y[k]|` over the band; ties go to the lowest bin.
pub fn peak_in_band(spectrum: &[Complex64], band: &BandSpec, sampling_rate: f64) -> Result<SpectralPeak> {
    let n = spectrum.len();
    let bins = band_bins(band, n, sampling_rate)?;
    let mut best = (bins[0], spectrum[bins[0]].norm());
    for &k in &bins[1..] {
        let mag = spectrum[k].norm();
        if mag > best.1 {
            best = (k, mag);
        }
    }
    let mut mags: Vec<f64> = bins.iter().map(|&k| spectrum[k].norm()).collect();
    mags.sort_by(f64::total_cmp);
    let mid = mags.len() / 2;
    let median_magnitude = if mags.len() % 2 == 1 {
        mags[mid]
    } else {
        0.5 * (mags[mid - 1] + mags[mid])
    };
    Ok(SpectralPeak {
        bin: best.0,
        frequency: best.0 as f64 * sampling_rate / n as f64,
        magnitude: best.1,
        median_magnitude,
    })
}
