//! Visible-light sensing of breathing and heart rate.
//!
//! A breathing subject modulates the distance to a co-located LED and photodetector, and
//! the Lambertian channel turns that into a received-power trace ([`optics`], [`physio`]).
//! The estimator ([`dsp`]) band-pass filters each window, applies a Hanning taper, takes
//! the FFT and reports the strongest in-band tone as a rate. [`metrics`] scores estimates
//! against ground truth, [`io`] persists traces and configuration, and [`cli`] composes the
//! pieces into simulation, estimation, sweep and filter-response commands.

pub mod cli;
pub mod dsp;
mod error;
pub mod io;
pub mod metrics;
pub mod optics;
pub mod physio;

pub use error::{Error, Result};
