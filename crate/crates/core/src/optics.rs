//! Lambertian optical channel.
//!
//! Two views of the same channel are provided. [`LambertianChannel::received_power_geometric`]
//! is the full Lambertian link equation with transmit power, detector area and the
//! irradiance/incidence angles. [`LambertianChannel::received_power_from_distance`] is the
//! fitted distance-only power law `P = K * d^(-gamma)` used for on-axis subjects.
//!
//! `K` is carried in decibels and interpreted as `10 * log10` of the received power in
//! watts at `d = 1 m` with `d` in meters. Other conventions (centimeters, dBm) are not
//! supported; convert before constructing the channel.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

/// Fitted system constant from the bench measurements, dB re 1 W at 1 m.
pub const FITTED_SYSTEM_CONSTANT_DB: f64 = -111.2;
/// Fitted path-loss exponent from the bench measurements.
pub const FITTED_PATH_LOSS_EXPONENT: f64 = 3.238;
/// Active area of a 10 mm x 10 mm photodiode, square meters.
pub const DEFAULT_DETECTOR_AREA: f64 = 1e-4;
/// Half-power semi-angle of a typical indoor LED luminaire.
pub const DEFAULT_HALF_POWER_SEMI_ANGLE: f64 = PI / 3.0;

/// Order of the Lambertian emission pattern for a given half-power semi-angle.
///
/// `n = -ln 2 / ln cos(half_angle)`. The angle must lie strictly inside `(0, pi/2)`.
pub fn lambertian_order(half_power_semi_angle: f64) -> Result<f64> {
    if !(half_power_semi_angle > 0.0 && half_power_semi_angle < PI / 2.0) {
        return Err(Error::Domain(format!(
            "half-power semi-angle {half_power_semi_angle} rad must lie in (0, pi/2)"
        )));
    }
    let log_cos = half_power_semi_angle.cos().ln();
    if log_cos >= 0.0 {
        // cos rounds to 1 for angles below ~1e-8 rad
        return Err(Error::Domain(format!(
            "half-power semi-angle {half_power_semi_angle} rad is too small to resolve"
        )));
    }
    Ok(-LN_2 / log_cos)
}

/// Transmitter/receiver parameters and fitted path-loss constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambertianChannel {
    transmit_power: f64,
    detector_area: f64,
    half_power_semi_angle: f64,
    lambertian_order: f64,
    path_loss_exponent: f64,
    system_constant_db: f64,
}

impl LambertianChannel {
    pub fn new(
        transmit_power: f64,
        detector_area: f64,
        half_power_semi_angle: f64,
        path_loss_exponent: f64,
        system_constant_db: f64,
    ) -> Result<Self> {
        let lambertian_order = lambertian_order(half_power_semi_angle)?;
        if !(transmit_power.is_finite() && transmit_power > 0.0) {
            return Err(Error::Validation(format!(
                "transmit power must be positive, got {transmit_power}"
            )));
        }
        if !(detector_area.is_finite() && detector_area > 0.0) {
            return Err(Error::Validation(format!(
                "detector area must be positive, got {detector_area}"
            )));
        }
        if !(path_loss_exponent.is_finite() && path_loss_exponent > 0.0) {
            return Err(Error::Validation(format!(
                "path-loss exponent must be positive, got {path_loss_exponent}"
            )));
        }
        if !system_constant_db.is_finite() {
            return Err(Error::Validation(format!(
                "system constant must be finite, got {system_constant_db} dB"
            )));
        }
        Ok(Self {
            transmit_power,
            detector_area,
            half_power_semi_angle,
            lambertian_order,
            path_loss_exponent,
            system_constant_db,
        })
    }

    /// Channel with the given fitted constants whose transmit power is chosen so that the
    /// geometric form at normal incidence agrees with the fitted power law.
    pub fn calibrated(
        system_constant_db: f64,
        path_loss_exponent: f64,
        half_power_semi_angle: f64,
        detector_area: f64,
    ) -> Result<Self> {
        let n = lambertian_order(half_power_semi_angle)?;
        let k = 10f64.powf(system_constant_db / 10.0);
        let transmit_power = 2.0 * PI * k / ((n + 1.0) * detector_area);
        Self::new(
            transmit_power,
            detector_area,
            half_power_semi_angle,
            path_loss_exponent,
            system_constant_db,
        )
    }

    pub fn transmit_power(&self) -> f64 {
        self.transmit_power
    }

    pub fn detector_area(&self) -> f64 {
        self.detector_area
    }

    pub fn half_power_semi_angle(&self) -> f64 {
        self.half_power_semi_angle
    }

    pub fn lambertian_order(&self) -> f64 {
        self.lambertian_order
    }

    pub fn path_loss_exponent(&self) -> f64 {
        self.path_loss_exponent
    }

    pub fn system_constant_db(&self) -> f64 {
        self.system_constant_db
    }

    /// Linear system constant `K = 10^(K_dB / 10)`, watts at one meter.
    pub fn system_constant(&self) -> f64 {
        10f64.powf(self.system_constant_db / 10.0)
    }

    /// Received power from the full Lambertian link equation.
    ///
    /// Incidence angles at or beyond the half-power semi-angle are rejected.
    pub fn received_power_geometric(&self, distance: f64, irradiance_angle: f64, incidence_angle: f64) -> Result<f64> {
        check_distance(distance)?;
        for (name, angle) in [("irradiance", irradiance_angle), ("incidence", incidence_angle)] {
            if !(0.0..PI / 2.0).contains(&angle) {
                return Err(Error::Domain(format!("{name} angle {angle} rad must lie in [0, pi/2)")));
            }
        }
        if incidence_angle >= self.half_power_semi_angle {
            return Err(Error::OutOfFieldOfView {
                incidence: incidence_angle,
                half_angle: self.half_power_semi_angle,
            });
        }
        let n = self.lambertian_order;
        let gain = (n + 1.0) * self.detector_area * self.transmit_power / (2.0 * PI);
        Ok(gain * irradiance_angle.cos().powf(n) * incidence_angle.cos() / distance.powf(self.path_loss_exponent))
    }

    /// Received power from the fitted power law `K * d^(-gamma)`.
    pub fn received_power_from_distance(&self, distance: f64) -> Result<f64> {
        check_distance(distance)?;
        Ok(self.system_constant() * distance.powf(-self.path_loss_exponent))
    }
}

impl Default for LambertianChannel {
    /// Fitted bench constants, 60 degree LED, 1 cm^2 detector, calibrated transmit power.
    fn default() -> Self {
        Self::calibrated(
            FITTED_SYSTEM_CONSTANT_DB,
            FITTED_PATH_LOSS_EXPONENT,
            DEFAULT_HALF_POWER_SEMI_ANGLE,
            DEFAULT_DETECTOR_AREA,
        )
        .expect("default channel parameters are valid")
    }
}

fn check_distance(distance: f64) -> Result<()> {
    if distance.is_finite() && distance > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("distance must be positive, got {distance} m")))
    }
}
