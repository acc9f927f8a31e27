//! Run configuration: pipeline, simulator and sweep settings in one INI file.
//!
//! Every key is written on save and every missing key takes its default on load, so a
//! saved file is fully explicit and an empty file is a valid configuration. Unknown
//! sections and keys are rejected. Optional values are written as an empty string.

use std::collections::BTreeMap;
use std::fmt::{Display, Write as _};
use std::path::Path;
use std::str::FromStr;

use ini::Ini;

use crate::cli::{GridAxis, SweepSpec};
use crate::dsp::{
    design_bandpass, BandSpec, ChebyshevDesign, EdgeConvention, FilterCoefficients, FilterPreset, PipelineConfig,
    VitalKind, DEFAULT_CONFIDENCE_RATIO, DEFAULT_SAMPLING_RATE, DEFAULT_WINDOW_SIZE,
};
use crate::error::{Error, Result};
use crate::optics::{LambertianChannel, DEFAULT_DETECTOR_AREA, FITTED_PATH_LOSS_EXPONENT, FITTED_SYSTEM_CONSTANT_DB};
use crate::physio::{
    AdcModel, AdditiveNoise, NoiseModel, Quantizer, RateKnot, RateSchedule, SubjectMotion, Tone, Waveform,
};

pub const CONFIG_FORMAT_VERSION: u32 = 1;

/// Band-pass filter used for one vital kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterChoice {
    /// Chebyshev II designed from the band edges.
    Designed,
    PaperHeart,
    PaperBreathing,
    /// Pass-through.
    Identity,
}

impl FilterChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterChoice::Designed => "designed",
            FilterChoice::PaperHeart => "paper-heart",
            FilterChoice::PaperBreathing => "paper-breathing",
            FilterChoice::Identity => "identity",
        }
    }
}

impl FromStr for FilterChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "designed" => Ok(FilterChoice::Designed),
            "paper-heart" => Ok(FilterChoice::PaperHeart),
            "paper-breathing" => Ok(FilterChoice::PaperBreathing),
            "identity" => Ok(FilterChoice::Identity),
            other => Err(Error::Validation(format!(
                "unknown filter `{other}` (expected designed, paper-heart, paper-breathing or identity)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSettings {
    pub window_size: usize,
    pub window_overlap: f64,
    pub breathing_low_bpm: f64,
    pub breathing_high_bpm: f64,
    pub heart_low_bpm: f64,
    pub heart_high_bpm: f64,
    pub breathing_filter: FilterChoice,
    pub heart_filter: FilterChoice,
    pub filter_order: usize,
    pub stopband_db: f64,
    pub filter_edges: EdgeConvention,
    /// Accept preset coefficients that fail the stability check.
    pub allow_unstable: bool,
    pub confidence_ratio: f64,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        let design = ChebyshevDesign::default();
        let (b, h) = (BandSpec::breathing(), BandSpec::heart());
        Self {
            window_size: DEFAULT_WINDOW_SIZE,
            window_overlap: 0.0,
            breathing_low_bpm: b.low_bpm,
            breathing_high_bpm: b.high_bpm,
            heart_low_bpm: h.low_bpm,
            heart_high_bpm: h.high_bpm,
            breathing_filter: FilterChoice::Designed,
            heart_filter: FilterChoice::Designed,
            filter_order: design.order,
            stopband_db: design.stopband_db,
            filter_edges: design.edges,
            allow_unstable: false,
            confidence_ratio: DEFAULT_CONFIDENCE_RATIO,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectSettings {
    pub rest_distance: f64,
    pub breathing_amplitude: f64,
    pub breathing_bpm: f64,
    pub breathing_phase_rad: f64,
    pub heartbeat_amplitude: f64,
    pub heart_bpm: f64,
    pub heartbeat_phase_rad: f64,
    /// `None` for a pure sinusoid, otherwise the harmonic-train ratio.
    pub harmonic_ratio: Option<f64>,
    /// Off-boresight angle; `None` keeps the subject on axis.
    pub bearing_deg: Option<f64>,
    /// Empty for constant rates.
    pub rate_schedule: Vec<RateKnot>,
}

impl Default for SubjectSettings {
    fn default() -> Self {
        let m = SubjectMotion::default();
        Self {
            rest_distance: m.rest_distance,
            breathing_amplitude: m.breathing_amplitude,
            breathing_bpm: m.breathing_rate * 60.0,
            breathing_phase_rad: m.breathing_phase,
            heartbeat_amplitude: m.heartbeat_amplitude,
            heart_bpm: m.heartbeat_rate * 60.0,
            heartbeat_phase_rad: m.heartbeat_phase,
            harmonic_ratio: None,
            bearing_deg: None,
            rate_schedule: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSettings {
    pub system_constant_db: f64,
    pub path_loss_exponent: f64,
    pub half_power_semi_angle_deg: f64,
    pub detector_area: f64,
    /// `None` calibrates the transmit power against the fitted constants.
    pub transmit_power: Option<f64>,
}

impl Default for ChannelSettings {
    fn default() -> Self {
        Self {
            system_constant_db: FITTED_SYSTEM_CONSTANT_DB,
            path_loss_exponent: FITTED_PATH_LOSS_EXPONENT,
            half_power_semi_angle_deg: 60.0,
            detector_area: DEFAULT_DETECTOR_AREA,
            transmit_power: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionSettings {
    pub sampling_rate: f64,
    pub duration: f64,
    /// `None` disables quantization.
    pub bit_depth: Option<u32>,
    pub full_scale: f64,
}

impl Default for AcquisitionSettings {
    fn default() -> Self {
        Self {
            sampling_rate: DEFAULT_SAMPLING_RATE,
            duration: 60.0,
            bit_depth: None,
            full_scale: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSettings {
    pub std: f64,
    /// Takes precedence over `std` when present.
    pub snr_db: Option<f64>,
    pub drift_amplitude: f64,
    pub drift_period: f64,
    pub interference: Vec<Tone>,
    pub seed: u64,
}

impl Default for NoiseSettings {
    fn default() -> Self {
        let n = NoiseModel::default();
        Self {
            std: 0.0,
            snr_db: None,
            drift_amplitude: n.drift_amplitude,
            drift_period: n.drift_period,
            interference: n.interference,
            seed: n.seed,
        }
    }
}

/// Everything a command needs besides its file paths.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub pipeline: PipelineSettings,
    pub subject: SubjectSettings,
    pub channel: ChannelSettings,
    pub acquisition: AcquisitionSettings,
    pub noise: NoiseSettings,
    pub sweep: SweepSpec,
}

impl RunConfig {
    /// Check every block without designing filters.
    pub fn validate(&self) -> Result<()> {
        let p = &self.pipeline;
        BandSpec::new(p.breathing_low_bpm, p.breathing_high_bpm, VitalKind::Breathing)?;
        BandSpec::new(p.heart_low_bpm, p.heart_high_bpm, VitalKind::Heart)?;
        if p.window_size < 2 || !p.window_size.is_power_of_two() {
            return Err(Error::Validation(format!(
                "window size {} must be a power of two >= 2",
                p.window_size
            )));
        }
        if !(0.0..1.0).contains(&p.window_overlap) {
            return Err(Error::Validation(format!(
                "window overlap {} must lie in [0, 1)",
                p.window_overlap
            )));
        }
        if !(p.confidence_ratio.is_finite() && p.confidence_ratio >= 0.0) {
            return Err(Error::Validation("confidence ratio must be non-negative".into()));
        }
        self.subject_motion()?.validate()?;
        self.channel()?;
        self.adc().validate()?;
        self.noise_model().validate()?;
        if !(self.acquisition.duration.is_finite() && self.acquisition.duration > 0.0) {
            return Err(Error::Validation(format!(
                "duration must be positive, got {}",
                self.acquisition.duration
            )));
        }
        self.sweep.validate()
    }

    pub fn breathing_band(&self) -> Result<BandSpec> {
        BandSpec::new(
            self.pipeline.breathing_low_bpm,
            self.pipeline.breathing_high_bpm,
            VitalKind::Breathing,
        )
    }

    pub fn heart_band(&self) -> Result<BandSpec> {
        BandSpec::new(
            self.pipeline.heart_low_bpm,
            self.pipeline.heart_high_bpm,
            VitalKind::Heart,
        )
    }

    pub fn design(&self) -> ChebyshevDesign {
        ChebyshevDesign {
            order: self.pipeline.filter_order,
            stopband_db: self.pipeline.stopband_db,
            edges: self.pipeline.filter_edges,
        }
    }

    /// Filter for `kind` at `sampling_rate`, honoring `allow_unstable`.
    pub fn filter_for(&self, kind: VitalKind, sampling_rate: f64, allow_unstable: bool) -> Result<FilterCoefficients> {
        let (choice, band) = match kind {
            VitalKind::Breathing => (self.pipeline.breathing_filter, self.breathing_band()?),
            VitalKind::Heart => (self.pipeline.heart_filter, self.heart_band()?),
        };
        match choice {
            FilterChoice::Designed => design_bandpass(&self.design(), band.low_hz(), band.high_hz(), sampling_rate),
            FilterChoice::PaperHeart => FilterPreset::PaperHeart.coefficients(allow_unstable),
            FilterChoice::PaperBreathing => FilterPreset::PaperBreathing.coefficients(allow_unstable),
            FilterChoice::Identity => Ok(FilterCoefficients::identity()),
        }
    }

    pub fn pipeline_config(&self) -> Result<PipelineConfig> {
        self.pipeline_config_at(self.acquisition.sampling_rate)
    }

    /// Pipeline for a trace sampled at `sampling_rate`.
    pub fn pipeline_config_at(&self, sampling_rate: f64) -> Result<PipelineConfig> {
        let allow = self.pipeline.allow_unstable;
        let config = PipelineConfig {
            window_size: self.pipeline.window_size,
            window_overlap: self.pipeline.window_overlap,
            sampling_rate,
            breathing_band: self.breathing_band()?,
            heart_band: self.heart_band()?,
            breathing_filter: self.filter_for(VitalKind::Breathing, sampling_rate, allow)?,
            heart_filter: self.filter_for(VitalKind::Heart, sampling_rate, allow)?,
            confidence_ratio: self.pipeline.confidence_ratio,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn subject_motion(&self) -> Result<SubjectMotion> {
        let s = &self.subject;
        let rate_schedule = if s.rate_schedule.is_empty() {
            None
        } else {
            Some(RateSchedule::new(s.rate_schedule.clone())?)
        };
        Ok(SubjectMotion {
            rest_distance: s.rest_distance,
            breathing_amplitude: s.breathing_amplitude,
            breathing_rate: s.breathing_bpm / 60.0,
            breathing_phase: s.breathing_phase_rad,
            heartbeat_amplitude: s.heartbeat_amplitude,
            heartbeat_rate: s.heart_bpm / 60.0,
            heartbeat_phase: s.heartbeat_phase_rad,
            heartbeat_waveform: match s.harmonic_ratio {
                None => Waveform::Sinusoid,
                Some(r) => Waveform::HarmonicTrain { relative_amplitude: r },
            },
            rate_schedule,
            bearing: s.bearing_deg.map(f64::to_radians),
        })
    }

    pub fn channel(&self) -> Result<LambertianChannel> {
        let c = &self.channel;
        let half = c.half_power_semi_angle_deg.to_radians();
        match c.transmit_power {
            None => LambertianChannel::calibrated(c.system_constant_db, c.path_loss_exponent, half, c.detector_area),
            Some(pt) => LambertianChannel::new(pt, c.detector_area, half, c.path_loss_exponent, c.system_constant_db),
        }
    }

    pub fn adc(&self) -> AdcModel {
        let a = &self.acquisition;
        AdcModel {
            sampling_rate: a.sampling_rate,
            quantizer: a.bit_depth.map(|bit_depth| Quantizer {
                bit_depth,
                full_scale: a.full_scale,
            }),
        }
    }

    pub fn noise_model(&self) -> NoiseModel {
        let n = &self.noise;
        NoiseModel {
            additive: match n.snr_db {
                Some(db) => AdditiveNoise::SnrDb(db),
                None => AdditiveNoise::Std(n.std),
            },
            drift_amplitude: n.drift_amplitude,
            drift_period: n.drift_period,
            interference: n.interference.clone(),
            seed: n.seed,
        }
    }

    /// INI text with every key present.
    pub fn to_ini_string(&self) -> String {
        let mut out = format!("format_version = {CONFIG_FORMAT_VERSION}\n");
        let p = &self.pipeline;
        section(
            &mut out,
            "pipeline",
            &[
                ("window_size", p.window_size.to_string()),
                ("window_overlap", p.window_overlap.to_string()),
                ("breathing_low_bpm", p.breathing_low_bpm.to_string()),
                ("breathing_high_bpm", p.breathing_high_bpm.to_string()),
                ("heart_low_bpm", p.heart_low_bpm.to_string()),
                ("heart_high_bpm", p.heart_high_bpm.to_string()),
                ("breathing_filter", p.breathing_filter.as_str().into()),
                ("heart_filter", p.heart_filter.as_str().into()),
                ("filter_order", p.filter_order.to_string()),
                ("stopband_db", p.stopband_db.to_string()),
                ("filter_edges", edges_str(p.filter_edges).into()),
                ("allow_unstable", p.allow_unstable.to_string()),
                ("confidence_ratio", p.confidence_ratio.to_string()),
            ],
        );

        let s = &self.subject;
        section(
            &mut out,
            "subject",
            &[
                ("rest_distance", s.rest_distance.to_string()),
                ("breathing_amplitude", s.breathing_amplitude.to_string()),
                ("breathing_bpm", s.breathing_bpm.to_string()),
                ("breathing_phase_rad", s.breathing_phase_rad.to_string()),
                ("heartbeat_amplitude", s.heartbeat_amplitude.to_string()),
                ("heart_bpm", s.heart_bpm.to_string()),
                ("heartbeat_phase_rad", s.heartbeat_phase_rad.to_string()),
                ("harmonic_ratio", opt(s.harmonic_ratio)),
                ("bearing_deg", opt(s.bearing_deg)),
                ("rate_schedule", format_schedule(&s.rate_schedule)),
            ],
        );

        let c = &self.channel;
        section(
            &mut out,
            "channel",
            &[
                ("system_constant_db", c.system_constant_db.to_string()),
                ("path_loss_exponent", c.path_loss_exponent.to_string()),
                ("half_power_semi_angle_deg", c.half_power_semi_angle_deg.to_string()),
                ("detector_area", c.detector_area.to_string()),
                ("transmit_power", opt(c.transmit_power)),
            ],
        );

        let a = &self.acquisition;
        section(
            &mut out,
            "acquisition",
            &[
                ("sampling_rate", a.sampling_rate.to_string()),
                ("duration", a.duration.to_string()),
                ("bit_depth", opt(a.bit_depth)),
                ("full_scale", a.full_scale.to_string()),
            ],
        );

        let n = &self.noise;
        section(
            &mut out,
            "noise",
            &[
                ("std", n.std.to_string()),
                ("snr_db", opt(n.snr_db)),
                ("drift_amplitude", n.drift_amplitude.to_string()),
                ("drift_period", n.drift_period.to_string()),
                ("interference", format_tones(&n.interference)),
                ("seed", n.seed.to_string()),
            ],
        );

        let w = &self.sweep;
        section(
            &mut out,
            "sweep",
            &[
                ("parameter", w.parameter.as_str().into()),
                ("values", join(&w.values)),
                ("grid_x_min", w.grid_x.min.to_string()),
                ("grid_x_max", w.grid_x.max.to_string()),
                ("grid_x_steps", w.grid_x.steps.to_string()),
                ("grid_y_min", w.grid_y.min.to_string()),
                ("grid_y_max", w.grid_y.max.to_string()),
                ("grid_y_steps", w.grid_y.steps.to_string()),
                ("trials", w.trials.to_string()),
                ("seed_base", w.seed_base.to_string()),
                ("breathing_bpm_min", w.breathing_bpm.0.to_string()),
                ("breathing_bpm_max", w.breathing_bpm.1.to_string()),
                ("heart_bpm_min", w.heart_bpm.0.to_string()),
                ("heart_bpm_max", w.heart_bpm.1.to_string()),
            ],
        );
        out
    }

    /// Parse INI text; `origin` names the source in error messages.
    pub fn from_ini_str(text: &str, origin: &str) -> Result<Self> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| Error::Parse {
            path: origin.into(),
            line: e.line,
            message: e.msg.to_string(),
        })?;
        let mut sections = Sections::collect(&ini, origin)?;
        let mut cfg = RunConfig::default();

        {
            let general = sections.take(None);
            let mut r = Reader::new(general, "", origin);
            let version: u32 = r.get("format_version", CONFIG_FORMAT_VERSION)?;
            if version != CONFIG_FORMAT_VERSION {
                return Err(Error::Parse {
                    path: origin.into(),
                    line: 0,
                    message: format!("unsupported format_version {version} (expected {CONFIG_FORMAT_VERSION})"),
                });
            }
            sections.unknown.extend(r.leftover());
        }

        let mut r = Reader::new(sections.take(Some("pipeline")), "pipeline", origin);
        let p = &mut cfg.pipeline;
        p.window_size = r.get("window_size", p.window_size)?;
        p.window_overlap = r.get("window_overlap", p.window_overlap)?;
        p.breathing_low_bpm = r.get("breathing_low_bpm", p.breathing_low_bpm)?;
        p.breathing_high_bpm = r.get("breathing_high_bpm", p.breathing_high_bpm)?;
        p.heart_low_bpm = r.get("heart_low_bpm", p.heart_low_bpm)?;
        p.heart_high_bpm = r.get("heart_high_bpm", p.heart_high_bpm)?;
        p.breathing_filter = r.get("breathing_filter", p.breathing_filter)?;
        p.heart_filter = r.get("heart_filter", p.heart_filter)?;
        p.filter_order = r.get("filter_order", p.filter_order)?;
        p.stopband_db = r.get("stopband_db", p.stopband_db)?;
        p.filter_edges = r.with("filter_edges", p.filter_edges, parse_edges)?;
        p.allow_unstable = r.get("allow_unstable", p.allow_unstable)?;
        p.confidence_ratio = r.get("confidence_ratio", p.confidence_ratio)?;
        sections.unknown.extend(r.leftover());

        let mut r = Reader::new(sections.take(Some("subject")), "subject", origin);
        let s = &mut cfg.subject;
        s.rest_distance = r.get("rest_distance", s.rest_distance)?;
        s.breathing_amplitude = r.get("breathing_amplitude", s.breathing_amplitude)?;
        s.breathing_bpm = r.get("breathing_bpm", s.breathing_bpm)?;
        s.breathing_phase_rad = r.get("breathing_phase_rad", s.breathing_phase_rad)?;
        s.heartbeat_amplitude = r.get("heartbeat_amplitude", s.heartbeat_amplitude)?;
        s.heart_bpm = r.get("heart_bpm", s.heart_bpm)?;
        s.heartbeat_phase_rad = r.get("heartbeat_phase_rad", s.heartbeat_phase_rad)?;
        s.harmonic_ratio = r.optional("harmonic_ratio", s.harmonic_ratio)?;
        s.bearing_deg = r.optional("bearing_deg", s.bearing_deg)?;
        s.rate_schedule = r.with("rate_schedule", std::mem::take(&mut s.rate_schedule), parse_schedule)?;
        sections.unknown.extend(r.leftover());

        let mut r = Reader::new(sections.take(Some("channel")), "channel", origin);
        let c = &mut cfg.channel;
        c.system_constant_db = r.get("system_constant_db", c.system_constant_db)?;
        c.path_loss_exponent = r.get("path_loss_exponent", c.path_loss_exponent)?;
        c.half_power_semi_angle_deg = r.get("half_power_semi_angle_deg", c.half_power_semi_angle_deg)?;
        c.detector_area = r.get("detector_area", c.detector_area)?;
        c.transmit_power = r.optional("transmit_power", c.transmit_power)?;
        sections.unknown.extend(r.leftover());

        let mut r = Reader::new(sections.take(Some("acquisition")), "acquisition", origin);
        let a = &mut cfg.acquisition;
        a.sampling_rate = r.get("sampling_rate", a.sampling_rate)?;
        a.duration = r.get("duration", a.duration)?;
        a.bit_depth = r.optional("bit_depth", a.bit_depth)?;
        a.full_scale = r.get("full_scale", a.full_scale)?;
        sections.unknown.extend(r.leftover());

        let mut r = Reader::new(sections.take(Some("noise")), "noise", origin);
        let n = &mut cfg.noise;
        n.std = r.get("std", n.std)?;
        n.snr_db = r.optional("snr_db", n.snr_db)?;
        n.drift_amplitude = r.get("drift_amplitude", n.drift_amplitude)?;
        n.drift_period = r.get("drift_period", n.drift_period)?;
        n.interference = r.with("interference", std::mem::take(&mut n.interference), parse_tones)?;
        n.seed = r.get("seed", n.seed)?;
        sections.unknown.extend(r.leftover());

        let mut r = Reader::new(sections.take(Some("sweep")), "sweep", origin);
        let w = &mut cfg.sweep;
        w.parameter = r.get("parameter", w.parameter)?;
        w.values = r.with("values", std::mem::take(&mut w.values), parse_list)?;
        w.grid_x = GridAxis {
            min: r.get("grid_x_min", w.grid_x.min)?,
            max: r.get("grid_x_max", w.grid_x.max)?,
            steps: r.get("grid_x_steps", w.grid_x.steps)?,
        };
        w.grid_y = GridAxis {
            min: r.get("grid_y_min", w.grid_y.min)?,
            max: r.get("grid_y_max", w.grid_y.max)?,
            steps: r.get("grid_y_steps", w.grid_y.steps)?,
        };
        w.trials = r.get("trials", w.trials)?;
        w.seed_base = r.get("seed_base", w.seed_base)?;
        w.breathing_bpm = (
            r.get("breathing_bpm_min", w.breathing_bpm.0)?,
            r.get("breathing_bpm_max", w.breathing_bpm.1)?,
        );
        w.heart_bpm = (
            r.get("heart_bpm_min", w.heart_bpm.0)?,
            r.get("heart_bpm_max", w.heart_bpm.1)?,
        );
        sections.unknown.extend(r.leftover());

        for name in sections.remaining.keys() {
            sections.unknown.push(format!("[{name}]"));
        }
        if !sections.unknown.is_empty() {
            return Err(Error::Validation(format!(
                "{origin}: unknown configuration keys: {}",
                sections.unknown.join(", ")
            )));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn section(out: &mut String, name: &str, entries: &[(&str, String)]) {
    let _ = writeln!(out, "\n[{name}]");
    for (key, value) in entries {
        let _ = writeln!(out, "{key} = {value}");
    }
}

fn opt<T: Display>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

fn edges_str(edges: EdgeConvention) -> &'static str {
    match edges {
        EdgeConvention::Passband => "passband",
        EdgeConvention::Stopband => "stopband",
    }
}

fn parse_edges(s: &str) -> std::result::Result<EdgeConvention, String> {
    match s {
        "passband" => Ok(EdgeConvention::Passband),
        "stopband" => Ok(EdgeConvention::Stopband),
        other => Err(format!("expected passband or stopband, got `{other}`")),
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("`{}` is not a number", s.trim()))
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_f64).collect()
}

/// Format a rate schedule as `time:breathing:heart` triples.
pub fn format_schedule(knots: &[RateKnot]) -> String {
    knots
        .iter()
        .map(|k| format!("{}:{}:{}", k.time, k.breathing_bpm, k.heart_bpm))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Parse `time:breathing:heart, ...` (seconds, BPM, BPM).
pub fn parse_schedule(s: &str) -> std::result::Result<Vec<RateKnot>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|item| {
            let parts: Vec<&str> = item.split(':').collect();
            let [t, b, h] = parts.as_slice() else {
                return Err(format!("schedule entry `{}` is not time:breathing:heart", item.trim()));
            };
            Ok(RateKnot {
                time: parse_f64(t)?,
                breathing_bpm: parse_f64(b)?,
                heart_bpm: parse_f64(h)?,
            })
        })
        .collect()
}

fn format_tones(tones: &[Tone]) -> String {
    tones
        .iter()
        .map(|t| format!("{}:{}", t.frequency, t.amplitude))
        .collect::<Vec<_>>()
        .join(", ")
}

fn parse_tones(s: &str) -> std::result::Result<Vec<Tone>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|item| match item.split_once(':') {
            Some((f, a)) => Ok(Tone {
                frequency: parse_f64(f)?,
                amplitude: parse_f64(a)?,
            }),
            None => Err(format!(
                "interference entry `{}` is not frequency:amplitude",
                item.trim()
            )),
        })
        .collect()
}

/// Sections of a parsed file, checked for duplicates.
struct Sections {
    remaining: BTreeMap<String, BTreeMap<String, String>>,
    general: BTreeMap<String, String>,
    unknown: Vec<String>,
}

impl Sections {
    fn collect(ini: &Ini, origin: &str) -> Result<Self> {
        let mut remaining: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut general = BTreeMap::new();
        for (name, props) in ini.iter() {
            let target = match name {
                None => &mut general,
                Some(n) => remaining.entry(n.to_string()).or_default(),
            };
            for (key, value) in props.iter() {
                if target.insert(key.to_string(), value.trim().to_string()).is_some() {
                    let where_ = name.map(|n| format!("[{n}] ")).unwrap_or_default();
                    return Err(Error::Validation(format!("{origin}: duplicate key {where_}{key}")));
                }
            }
        }
        Ok(Self {
            remaining,
            general,
            unknown: Vec::new(),
        })
    }

    fn take(&mut self, name: Option<&str>) -> BTreeMap<String, String> {
        match name {
            None => std::mem::take(&mut self.general),
            Some(n) => self.remaining.remove(n).unwrap_or_default(),
        }
    }
}

/// Pulls typed values out of one section, leaving unrecognized keys behind.
struct Reader<'a> {
    entries: BTreeMap<String, String>,
    section: &'a str,
    origin: &'a str,
}

impl<'a> Reader<'a> {
    fn new(entries: BTreeMap<String, String>, section: &'a str, origin: &'a str) -> Self {
        Self {
            entries,
            section,
            origin,
        }
    }

    fn error(&self, key: &str, message: impl Display) -> Error {
        let name = if self.section.is_empty() {
            key.to_string()
        } else {
            format!("[{}] {key}", self.section)
        };
        Error::Validation(format!("{}: {name}: {message}", self.origin))
    }

    fn with<T>(
        &mut self,
        key: &str,
        default: T,
        parse: impl FnOnce(&str) -> std::result::Result<T, String>,
    ) -> Result<T> {
        match self.entries.remove(key) {
            None => Ok(default),
            Some(raw) => parse(&raw).map_err(|m| self.error(key, m)),
        }
    }

    fn get<T: FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        self.with(key, default, |raw| {
            raw.parse::<T>().map_err(|e| format!("`{raw}`: {e}"))
        })
    }

    /// Empty string means `None`.
    fn optional<T: FromStr>(&mut self, key: &str, default: Option<T>) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        self.with(key, default, |raw| {
            if raw.is_empty() {
                Ok(None)
            } else {
                raw.parse::<T>().map(Some).map_err(|e| format!("`{raw}`: {e}"))
            }
        })
    }

    fn leftover(self) -> Vec<String> {
        let prefix = if self.section.is_empty() {
            String::new()
        } else {
            format!("[{}] ", self.section)
        };
        self.entries.into_keys().map(|k| format!("{prefix}{k}")).collect()
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::from_ini_str(&text, &path.display().to_string())
}

pub fn save_config(config: &RunConfig, path: &Path) -> Result<()> {
    config.validate()?;
    std::fs::write(path, config.to_ini_string()).map_err(|e| Error::io(path, e))
}
