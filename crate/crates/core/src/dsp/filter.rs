use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Poles within this distance of the unit circle count as unstable.
pub const STABILITY_TOLERANCE: f64 = 1e-9;

/// Heart-band coefficients as published (4 decimals), feedforward.
pub const PAPER_HEART_B: [f64; 9] = [
    0.0010, -0.0077, 0.0262, -0.0517, 0.0642, -0.0517, 0.0262, -0.0077, 0.0010,
];
/// Heart-band coefficients as published (4 decimals), feedback.
pub const PAPER_HEART_A: [f64; 9] = [
    1.0000, -7.8359, 26.8895, -52.7799, 64.8128, -50.9871, 25.0939, -7.0643, 0.8709,
];
pub const PAPER_BREATHING_B: [f64; 5] = [0.0007, 0.0, -0.0013, 0.0, 0.0007];
pub const PAPER_BREATHING_A: [f64; 5] = [1.0000, -3.9247, 5.7781, -3.7820, 0.9286];

/// Feedforward/feedback coefficients of a normalized (`a[0] == 1`) IIR filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterCoefficients {
    feedforward: Vec<f64>,
    feedback: Vec<f64>,
    label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityVerdict {
    Stable,
    /// A pole sits within [`STABILITY_TOLERANCE`] of the unit circle.
    Marginal,
    Unstable,
}

impl fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabilityVerdict::Stable => "stable",
            StabilityVerdict::Marginal => "marginal",
            StabilityVerdict::Unstable => "unstable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub max_pole_modulus: f64,
    /// `1 - max_pole_modulus`; negative when a pole lies outside the unit circle.
    pub margin: f64,
    pub verdict: StabilityVerdict,
}

impl Stability {
    pub fn is_stable(&self) -> bool {
        self.verdict == StabilityVerdict::Stable
    }
}

impl FilterCoefficients {
    /// Build a filter, rejecting any pole modulus `>= 1 - 1e-9`.
    pub fn new(feedforward: Vec<f64>, feedback: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let filter = Self::allow_unstable(feedforward, feedback, label)?;
        let stability = filter.stability();
        if !stability.is_stable() {
            return Err(Error::UnstableFilter {
                label: filter.label,
                max_pole_modulus: stability.max_pole_modulus,
            });
        }
        Ok(filter)
    }

    /// Build a filter without the stability check (still requires `a[0] == 1`).
    pub fn allow_unstable(feedforward: Vec<f64>, feedback: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if feedforward.is_empty() || feedback.is_empty() {
            return Err(Error::Validation(format!(
                "filter `{label}` has an empty coefficient vector"
            )));
        }
        if feedforward.iter().chain(&feedback).any(|c| !c.is_finite()) {
            return Err(Error::Validation(format!(
                "filter `{label}` has non-finite coefficients"
            )));
        }
        if feedback[0] != 1.0 {
            return Err(Error::Validation(format!(
                "filter `{label}` is not normalized: a[0] = {}",
                feedback[0]
            )));
        }
        Ok(Self {
            feedforward,
            feedback,
            label,
        })
    }

    /// Pass-through filter, `b = [1]`, `a = [1]`.
    pub fn identity() -> Self {
        Self {
            feedforward: vec![1.0],
            feedback: vec![1.0],
            label: "identity".into(),
        }
    }

    pub fn feedforward(&self) -> &[f64] {
        &self.feedforward
    }

    pub fn feedback(&self) -> &[f64] {
        &self.feedback
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Roots of the feedback polynomial in `z`.
    pub fn poles(&self) -> Vec<Complex64> {
        polynomial_roots(&self.feedback)
    }

    pub fn stability(&self) -> Stability {
        let max_pole_modulus = self.poles().iter().map(|p| p.norm()).fold(0.0, f64::max);
        let verdict = if max_pole_modulus < 1.0 - STABILITY_TOLERANCE {
            StabilityVerdict::Stable
        } else if max_pole_modulus <= 1.0 + STABILITY_TOLERANCE {
            StabilityVerdict::Marginal
        } else {
            StabilityVerdict::Unstable
        };
        Stability {
            max_pole_modulus,
            margin: 1.0 - max_pole_modulus,
            verdict,
        }
    }

    /// Complex gain `H(e^{jw})` at `freq` Hz for a sampling rate of `sampling_rate` Hz.
    pub fn frequency_response(&self, freq: f64, sampling_rate: f64) -> Complex64 {
        let omega = 2.0 * PI * freq / sampling_rate;
        let eval = |coeffs: &[f64]| -> Complex64 {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c * Complex64::from_polar(1.0, -omega * i as f64))
                .sum()
        };
        eval(&self.feedforward) / eval(&self.feedback)
    }

    /// Run the direct-form recurrence from zero initial conditions.
    pub fn filter(&self, signal: &[f64]) -> Result<Vec<f64>> {
        if signal.is_empty() {
            return Err(Error::Validation("cannot filter an empty signal".into()));
        }
        let b = &self.feedforward;
        let a = &self.feedback;
        let mut out = vec![0.0; signal.len()];
        for m in 0..signal.len() {
            let mut acc = 0.0;
            for (i, &bi) in b.iter().enumerate().take(m + 1) {
                acc += bi * signal[m - i];
            }
            for (j, &aj) in a.iter().enumerate().skip(1).take(m) {
                acc -= aj * out[m - j];
            }
            out[m] = acc;
        }
        Ok(out)
    }
}

/// `x[m] = sum_i b_i z[m-i] - sum_{j>=1} a_j x[m-j]`, zero initial conditions.
pub fn iir_filter(coeffs: &FilterCoefficients, signal: &[f64]) -> Result<Vec<f64>> {
    coeffs.filter(signal)
}

pub fn frequency_response(coeffs: &FilterCoefficients, freq: f64, sampling_rate: f64) -> Complex64 {
    coeffs.frequency_response(freq, sampling_rate)
}

/// Published coefficient sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterPreset {
    PaperHeart,
    PaperBreathing,
}

impl FilterPreset {
    pub fn label(self) -> &'static str {
        match self {
            FilterPreset::PaperHeart => "paper-heart",
            FilterPreset::PaperBreathing => "paper-breathing",
        }
    }

    /// Coefficients exactly as published. Both sets fail the stability check because of
    /// 4-decimal rounding, so `allow_unstable` must be set to obtain them.
    pub fn coefficients(self, allow_unstable: bool) -> Result<FilterCoefficients> {
        let (b, a): (&[f64], &[f64]) = match self {
            FilterPreset::PaperHeart => (&PAPER_HEART_B, &PAPER_HEART_A),
            FilterPreset::PaperBreathing => (&PAPER_BREATHING_B, &PAPER_BREATHING_A),
        };
        if allow_unstable {
            FilterCoefficients::allow_unstable(b.to_vec(), a.to_vec(), self.label())
        } else {
            FilterCoefficients::new(b.to_vec(), a.to_vec(), self.label())
        }
    }

    /// Stability of the published coefficients.
    pub fn stability(self) -> Stability {
        self.coefficients(true).expect("presets are normalized").stability()
    }
}

/// Roots of `c[0] z^n + c[1] z^(n-1) + ... + c[n]` via companion-matrix eigenvalues.
pub(crate) fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let first = coeffs.iter().position(|&c| c != 0.0);
    let Some(first) = first else { return Vec::new() };
    let c = &coeffs[first..];
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        companion[(0, j)] = -c[j + 1] / c[0];
    }
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    companion.complex_eigenvalues().iter().copied().collect()
}
