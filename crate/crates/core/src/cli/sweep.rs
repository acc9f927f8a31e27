//! Seeded Monte-Carlo trials and parameter sweeps.
//!
//! Trial `i` of every sweep point draws its rates, phases and noise seed from
//! `seed_base + i`, so points differ only in the swept parameter.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dsp::{estimate_vitals, PipelineConfig, VitalKind};
use crate::error::{Error, Result};
use crate::io::RunConfig;
use crate::metrics::{mean, VitalsReport};
use crate::physio::{synthesize_trace, AdditiveNoise};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Subject-to-sensor distance, meters.
    Distance,
    /// FFT window length, samples.
    WindowSize,
    /// Power SNR of the additive noise, dB.
    Snr,
    /// Subject position on an (x, y) grid, meters; x lateral, y along the boresight.
    PositionGrid,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::Distance => "distance",
            SweepParameter::WindowSize => "window_size",
            SweepParameter::Snr => "snr",
            SweepParameter::PositionGrid => "position-grid",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(SweepParameter::Distance),
            "window_size" | "window-size" | "window" => Ok(SweepParameter::WindowSize),
            "snr" => Ok(SweepParameter::Snr),
            "position-grid" | "position_grid" | "position" => Ok(SweepParameter::PositionGrid),
            other => Err(Error::Validation(format!(
                "unknown sweep parameter `{other}` (expected distance, window_size, snr or position-grid)"
            ))),
        }
    }
}

/// Inclusive evenly spaced axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        (0..self.steps)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    /// Swept values for every parameter except the position grid.
    pub values: Vec<f64>,
    pub grid_x: GridAxis,
    pub grid_y: GridAxis,
    pub trials: usize,
    pub seed_base: u64,
    /// Range the per-trial breathing rate is drawn from, BPM.
    pub breathing_bpm: (f64, f64),
    pub heart_bpm: (f64, f64),
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            parameter: SweepParameter::Distance,
            values: vec![0.3, 0.4, 0.6, 0.9, 1.2],
            grid_x: GridAxis {
                min: -0.3,
                max: 0.3,
                steps: 7,
            },
            grid_y: GridAxis {
                min: 0.3,
                max: 0.9,
                steps: 7,
            },
            trials: 10,
            seed_base: 0,
            breathing_bpm: (12.0, 20.0),
            heart_bpm: (60.0, 100.0),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Validation("sweep needs at least one trial per point".into()));
        }
        for (name, (lo, hi)) in [("breathing", self.breathing_bpm), ("heart", self.heart_bpm)] {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
                return Err(Error::Validation(format!("{name} rate range {lo}-{hi} BPM is invalid")));
            }
        }
        if self.parameter == SweepParameter::PositionGrid {
            for (name, axis) in [("x", self.grid_x), ("y", self.grid_y)] {
                if axis.steps == 0 || !(axis.min.is_finite() && axis.max.is_finite() && axis.min <= axis.max) {
                    return Err(Error::Validation(format!("grid axis {name} is invalid: {axis:?}")));
                }
            }
            if self.grid_y.min <= 0.0 {
                return Err(Error::Validation("grid y (boresight) values must be positive".into()));
            }
            return Ok(());
        }
        if self.values.is_empty() {
            return Err(Error::Validation("sweep has no values".into()));
        }
        for &v in &self.values {
            let ok = match self.parameter {
                SweepParameter::Distance => v.is_finite() && v > 0.0,
                SweepParameter::WindowSize => {
                    v >= 2.0 && v.fract() == 0.0 && v <= 1e9 && (v as usize).is_power_of_two()
                }
                SweepParameter::Snr => v.is_finite(),
                SweepParameter::PositionGrid => true,
            };
            if !ok {
                return Err(Error::Validation(format!("invalid {} value {v}", self.parameter)));
            }
        }
        Ok(())
    }

    /// Sweep points in output order.
    pub fn points(&self) -> Vec<SweepPoint> {
        match self.parameter {
            SweepParameter::PositionGrid => {
                let xs = self.grid_x.values();
                self.grid_y
                    .values()
                    .into_iter()
                    .flat_map(|y| xs.iter().map(move |&x| SweepPoint::Position { x, y }))
                    .collect()
            }
            p => self.values.iter().map(|&v| SweepPoint::Value(p, v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepPoint {
    Value(SweepParameter, f64),
    Position { x: f64, y: f64 },
}

/// One simulated measurement and its estimate.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub report: VitalsReport,
    pub mean_power: f64,
    pub breathing_bpm: f64,
    pub heart_bpm: f64,
}

/// Simulate and estimate trial `trial` of `spec` at `point`.
///
/// Returns `Ok(None)` when the point lies outside the detector field of view.
pub fn run_trial(
    config: &RunConfig,
    pipeline: &PipelineConfig,
    spec: &SweepSpec,
    point: SweepPoint,
    trial: usize,
) -> Result<Option<TrialOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed_base.wrapping_add(trial as u64));
    let breathing_bpm = draw(&mut rng, spec.breathing_bpm);
    let heart_bpm = draw(&mut rng, spec.heart_bpm);

    let mut motion = config.subject_motion()?;
    motion.rate_schedule = None;
    motion.breathing_rate = breathing_bpm / 60.0;
    motion.heartbeat_rate = heart_bpm / 60.0;
    motion.breathing_phase = rng.random::<f64>() * 2.0 * PI;
    motion.heartbeat_phase = rng.random::<f64>() * 2.0 * PI;
    let mut noise = config.noise_model();
    noise.seed = rng.random();
    let channel = config.channel()?;
    let mut pipeline = pipeline.clone();

    match point {
        SweepPoint::Value(SweepParameter::Distance, d) => motion.rest_distance = d,
        SweepPoint::Value(SweepParameter::WindowSize, n) => pipeline = pipeline.with_window_size(n as usize)?,
        SweepPoint::Value(SweepParameter::Snr, db) => noise.additive = AdditiveNoise::SnrDb(db),
        SweepPoint::Value(SweepParameter::PositionGrid, _) => {
            return Err(Error::Validation("position grid points carry coordinates".into()));
        }
        SweepPoint::Position { x, y } => {
            let bearing = x.atan2(y).abs();
            if bearing >= channel.half_power_semi_angle() {
                return Ok(None);
            }
            motion.rest_distance = x.hypot(y);
            motion.bearing = Some(bearing);
        }
    }

    let trace = synthesize_trace(&motion, &channel, &config.adc(), &noise, config.acquisition.duration)?;
    let report = estimate_vitals(&trace, &pipeline)?;
    Ok(Some(TrialOutcome {
        mean_power: trace.mean(),
        report,
        breathing_bpm,
        heart_bpm,
    }))
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    let u: f64 = rng.random();
    lo + (hi - lo) * u
}

/// Aggregate over the trials of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub trials: usize,
    /// `None` for out-of-view grid cells.
    pub breathing_error_pct: Option<f64>,
    pub heart_error_pct: Option<f64>,
    pub breathing_variance: Option<f64>,
    pub heart_variance: Option<f64>,
    pub mean_power: f64,
}

impl SweepRow {
    pub fn error_pct(&self, kind: VitalKind) -> Option<f64> {
        match kind {
            VitalKind::Breathing => self.breathing_error_pct,
            VitalKind::Heart => self.heart_error_pct,
        }
    }

    pub fn variance(&self, kind: VitalKind) -> Option<f64> {
        match kind {
            VitalKind::Breathing => self.breathing_variance,
            VitalKind::Heart => self.heart_variance,
        }
    }
}

/// Run every trial of every point. Points and trials run in parallel; rows come back in
/// point order.
pub fn run_sweep(config: &RunConfig, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let pipeline = config.pipeline_config()?;
    let points = spec.points();
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..spec.trials).map(move |t| (p, t)))
        .collect();
    let outcomes: Vec<Option<TrialOutcome>> = jobs
        .par_iter()
        .map(|&(p, t)| run_trial(config, &pipeline, spec, points[p], t))
        .collect::<Result<_>>()?;

    Ok(points
        .iter()
        .zip(outcomes.chunks(spec.trials))
        .map(|(&point, chunk)| summarize(point, chunk))
        .collect())
}

fn summarize(point: SweepPoint, outcomes: &[Option<TrialOutcome>]) -> SweepRow {
    let seen: Vec<&TrialOutcome> = outcomes.iter().flatten().collect();
    if seen.is_empty() {
        return SweepRow {
            point,
            trials: 0,
            breathing_error_pct: None,
            heart_error_pct: None,
            breathing_variance: None,
            heart_variance: None,
            mean_power: 0.0,
        };
    }
    let per_kind = |kind: VitalKind| {
        let errors: Vec<f64> = seen
            .iter()
            .filter_map(|o| o.report.summary(kind).raw_error_pct())
            .collect();
        let variances: Vec<f64> = seen.iter().map(|o| o.report.summary(kind).raw_variance_bpm).collect();
        (mean(&errors), mean(&variances))
    };
    let (breathing_error_pct, breathing_variance) = per_kind(VitalKind::Breathing);
    let (heart_error_pct, heart_variance) = per_kind(VitalKind::Heart);
    let powers: Vec<f64> = seen.iter().map(|o| o.mean_power).collect();
    SweepRow {
        point,
        trials: seen.len(),
        breathing_error_pct,
        heart_error_pct,
        breathing_variance,
        heart_variance,
        mean_power: mean(&powers).unwrap_or(0.0),
    }
}

/// CSV with one row per sweep point.
pub fn sweep_csv(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let lead = match spec.parameter {
        SweepParameter::PositionGrid => "x_m,y_m".to_string(),
        SweepParameter::Distance => "distance_m".to_string(),
        SweepParameter::WindowSize => "window_size".to_string(),
        SweepParameter::Snr => "snr_db".to_string(),
    };
    let _ = writeln!(
        out,
        "{lead},trials,breathing_error_pct,heart_error_pct,breathing_variance_bpm2,heart_variance_bpm2,mean_power_w"
    );
    let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
    for row in rows {
        let lead = match row.point {
            SweepPoint::Position { x, y } => format!("{x},{y}"),
            SweepPoint::Value(_, v) => format!("{v}"),
        };
        let _ = writeln!(
            out,
            "{lead},{},{},{},{},{},{:e}",
            row.trials,
            opt(row.breathing_error_pct),
            opt(row.heart_error_pct),
            opt(row.breathing_variance),
            opt(row.heart_variance),
            row.mean_power
        );
    }
    out
}
