//! Chebyshev Type-II band-pass design.
//!
//! Analog prototype poles/zeros, low-pass to band-pass transform around the prewarped
//! edges, then the bilinear transform. Gain is normalized to unity at the digital image of
//! the analog center frequency, where the band-pass maps onto the prototype's DC point.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::filter::FilterCoefficients;
use crate::error::{Error, Result};

/// What the band edges handed to [`design_bandpass`] mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeConvention {
    /// Edges are the -3 dB points; the stopband starts further out.
    Passband,
    /// Edges are where the response first reaches the stopband attenuation
    /// (the `cheby2(n, rs, Ws)` convention of MATLAB and SciPy).
    Stopband,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevDesign {
    /// Prototype order; the band-pass result has twice this order.
    pub order: usize,
    pub stopband_db: f64,
    pub edges: EdgeConvention,
}

impl Default for ChebyshevDesign {
    fn default() -> Self {
        Self {
            order: 4,
            stopband_db: 40.0,
            edges: EdgeConvention::Passband,
        }
    }
}

pub const MAX_DESIGN_ORDER: usize = 10;

/// Band-pass between `low_hz` and `high_hz` at `sampling_rate`.
pub fn design_bandpass(
    design: &ChebyshevDesign,
    low_hz: f64,
    high_hz: f64,
    sampling_rate: f64,
) -> Result<FilterCoefficients> {
    let n = design.order;
    if !(1..=MAX_DESIGN_ORDER).contains(&n) {
        return Err(Error::Validation(format!(
            "design order {n} outside 1..={MAX_DESIGN_ORDER}"
        )));
    }
    // the -3 dB point only exists below the stopband when rs > 10 log10 2
    let min_db = if design.edges == EdgeConvention::Passband {
        3.02
    } else {
        0.0
    };
    if !(design.stopband_db.is_finite() && design.stopband_db > min_db) {
        return Err(Error::Validation(format!(
            "stopband attenuation {} dB must exceed {min_db} dB",
            design.stopband_db
        )));
    }
    if !(low_hz > 0.0 && low_hz < high_hz && high_hz < sampling_rate / 2.0) {
        return Err(Error::Validation(format!(
            "band edges {low_hz}-{high_hz} Hz must satisfy 0 < low < high < {} Hz",
            sampling_rate / 2.0
        )));
    }

    let (mut zeros, mut poles) = prototype(n, design.stopband_db);
    if design.edges == EdgeConvention::Passband {
        let eps = 1.0 / (10f64.powf(design.stopband_db / 10.0) - 1.0).sqrt();
        let half_power = 1.0 / ((1.0 / eps).acosh() / n as f64).cosh();
        zeros.iter_mut().for_each(|z| *z /= half_power);
        poles.iter_mut().for_each(|p| *p /= half_power);
    }

    let warp = |f: f64| 2.0 * sampling_rate * (PI * f / sampling_rate).tan();
    let (w1, w2) = (warp(low_hz), warp(high_hz));
    let center = (w1 * w2).sqrt();
    let bandwidth = w2 - w1;

    let to_bandpass = |roots: &[Complex64]| -> Vec<Complex64> {
        roots
            .iter()
            .flat_map(|&r| {
                let half = r * bandwidth / 2.0;
                let disc = (half * half - center * center).sqrt();
                [half + disc, half - disc]
            })
            .collect()
    };
    let mut zeros_s = to_bandpass(&zeros);
    let poles_s = to_bandpass(&poles);
    // prototype zeros at infinity land at s = 0 (and infinity)
    let degree = poles.len() - zeros.len();
    zeros_s.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), degree));

    let fs2 = Complex64::new(2.0 * sampling_rate, 0.0);
    let bilinear = |s: Complex64| (fs2 + s) / (fs2 - s);
    let mut zeros_z: Vec<Complex64> = zeros_s.iter().map(|&s| bilinear(s)).collect();
    let poles_z: Vec<Complex64> = poles_s.iter().map(|&s| bilinear(s)).collect();
    zeros_z.extend(std::iter::repeat_n(
        Complex64::new(-1.0, 0.0),
        poles_z.len() - zeros_z.len(),
    ));

    let mut b = expand(&zeros_z);
    let a = expand(&poles_z);

    let center_hz = sampling_rate / PI * (center / (2.0 * sampling_rate)).atan();
    let unscaled = FilterCoefficients::allow_unstable(b.clone(), a.clone(), "designed")?;
    let gain = unscaled.frequency_response(center_hz, sampling_rate).norm();
    if !(gain.is_finite() && gain > 0.0) {
        return Err(Error::Numerical(format!(
            "designed filter has degenerate center gain {gain}"
        )));
    }
    b.iter_mut().for_each(|c| *c /= gain);
    FilterCoefficients::new(b, a, "designed-chebyshev2")
}

/// Chebyshev II analog low-pass prototype with the stopband edge at 1 rad/s.
fn prototype(order: usize, stopband_db: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let eps = 1.0 / (10f64.powf(stopband_db / 10.0) - 1.0).sqrt();
    let mu = (1.0 / eps).asinh() / order as f64;
    let mut zeros = Vec::with_capacity(order);
    let mut poles = Vec::with_capacity(order);
    for k in 0..order {
        let theta = PI * (2 * k + 1) as f64 / (2 * order) as f64;
        // dual of the Chebyshev I pole, inverted
        let p = Complex64::new(-mu.sinh() * theta.sin(), mu.cosh() * theta.cos());
        poles.push(p.inv());
        // odd orders put the middle zero at infinity
        if 2 * k + 1 != order {
            zeros.push(Complex64::new(0.0, 1.0 / theta.cos()));
        }
    }
    (zeros, poles)
}

/// Real coefficients of `prod (z - r)`, highest power first.
fn expand(roots: &[Complex64]) -> Vec<f64> {
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        poly = next;
    }
    poly.into_iter().map(|c| c.re).collect()
}
