//! Synthetic breathing subject, photodetector noise and ADC.
//!
//! Chest motion modulates the subject-to-sensor distance; the optical channel turns
//! that distance into received power. Inhale shortens the distance, so the power crest
//! is the inhale position and the trough the exhale position.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::io::{GroundTruth, Trace};
use crate::optics::LambertianChannel;

/// Lowest sampling rate that keeps the default heart band (200 BPM) below Nyquist.
pub const MIN_SAMPLING_RATE: f64 = 2.0 * 200.0 / 60.0;

/// Plausible peak-to-peak breathing excursion, meters.
pub const PLAUSIBLE_BREATHING_PTP: (f64, f64) = (0.005, 0.02);
/// Upper bound on plausible heartbeat peak-to-peak excursion, meters.
pub const PLAUSIBLE_HEARTBEAT_PTP: f64 = 0.002;

/// Shape of the heartbeat displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waveform {
    Sinusoid,
    /// Fundamental plus second and third harmonics at `r` and `r^2` of the fundamental.
    HarmonicTrain {
        relative_amplitude: f64,
    },
}

impl Waveform {
    fn eval(self, phase: f64) -> f64 {
        match self {
            Waveform::Sinusoid => phase.sin(),
            Waveform::HarmonicTrain { relative_amplitude: r } => {
                phase.sin() + r * (2.0 * phase).sin() + r * r * (3.0 * phase).sin()
            }
        }
    }

    /// Upper bound of `|eval|`.
    fn peak_bound(self) -> f64 {
        match self {
            Waveform::Sinusoid => 1.0,
            Waveform::HarmonicTrain { relative_amplitude: r } => 1.0 + r + r * r,
        }
    }
}

/// One knot of a piecewise-linear rate schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateKnot {
    pub time: f64,
    pub breathing_bpm: f64,
    pub heart_bpm: f64,
}

/// Piecewise-linear breathing and heart rates over time.
///
/// Rates are held constant before the first knot and after the last one. Phase is the
/// integral of the scheduled frequency, so rate changes never produce phase jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSchedule {
    knots: Vec<RateKnot>,
    // cycles accumulated from t = 0 up to each knot, (breathing, heart)
    cycles: Vec<(f64, f64)>,
}

impl RateSchedule {
    pub fn new(knots: Vec<RateKnot>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Validation("rate schedule needs at least one knot".into()));
        }
        for (i, k) in knots.iter().enumerate() {
            if !(k.time.is_finite() && k.time >= 0.0) {
                return Err(Error::Validation(format!(
                    "knot {i}: time must be >= 0, got {}",
                    k.time
                )));
            }
            if !(k.breathing_bpm > 0.0 && k.heart_bpm > 0.0) || !k.breathing_bpm.is_finite() || !k.heart_bpm.is_finite()
            {
                return Err(Error::Validation(format!("knot {i}: rates must be positive")));
            }
            if i > 0 && k.time <= knots[i - 1].time {
                return Err(Error::Validation(format!("knot {i}: times must strictly increase")));
            }
        }
        let first = knots[0];
        let mut cycles = Vec::with_capacity(knots.len());
        let mut acc = (
            first.time * first.breathing_bpm / 60.0,
            first.time * first.heart_bpm / 60.0,
        );
        cycles.push(acc);
        for pair in knots.windows(2) {
            let dt = pair[1].time - pair[0].time;
            acc.0 += dt * (pair[0].breathing_bpm + pair[1].breathing_bpm) / 120.0;
            acc.1 += dt * (pair[0].heart_bpm + pair[1].heart_bpm) / 120.0;
            cycles.push(acc);
        }
        Ok(Self { knots, cycles })
    }

    /// Linear ramp between two rate pairs over `[0, duration]`.
    pub fn ramp(duration: f64, from: (f64, f64), to: (f64, f64)) -> Result<Self> {
        Self::new(vec![
            RateKnot {
                time: 0.0,
                breathing_bpm: from.0,
                heart_bpm: from.1,
            },
            RateKnot {
                time: duration,
                breathing_bpm: to.0,
                heart_bpm: to.1,
            },
        ])
    }

    pub fn knots(&self) -> &[RateKnot] {
        &self.knots
    }

    /// Instantaneous (breathing, heart) rates in BPM.
    pub fn rates_at(&self, t: f64) -> (f64, f64) {
        let i = self.segment(t);
        let k = &self.knots;
        if t <= k[0].time {
            return (k[0].breathing_bpm, k[0].heart_bpm);
        }
        if i + 1 >= k.len() {
            let last = k[k.len() - 1];
            return (last.breathing_bpm, last.heart_bpm);
        }
        let frac = (t - k[i].time) / (k[i + 1].time - k[i].time);
        (
            k[i].breathing_bpm + frac * (k[i + 1].breathing_bpm - k[i].breathing_bpm),
            k[i].heart_bpm + frac * (k[i + 1].heart_bpm - k[i].heart_bpm),
        )
    }

    /// Cycles completed since t = 0, (breathing, heart).
    pub fn cycles_at(&self, t: f64) -> (f64, f64) {
        let k = &self.knots;
        if t <= k[0].time {
            return (t * k[0].breathing_bpm / 60.0, t * k[0].heart_bpm / 60.0);
        }
        let i = self.segment(t);
        let (rb, rh) = self.rates_at(t);
        let dt = t - k[i].time;
        (
            self.cycles[i].0 + dt * (k[i].breathing_bpm + rb) / 120.0,
            self.cycles[i].1 + dt * (k[i].heart_bpm + rh) / 120.0,
        )
    }

    /// Index of the last knot at or before `t` (0 when `t` precedes every knot).
    fn segment(&self, t: f64) -> usize {
        self.knots.partition_point(|k| k.time <= t).saturating_sub(1)
    }
}

/// Chest kinematics of the simulated subject.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectMotion {
    /// Nominal subject-to-sensor distance, meters.
    pub rest_distance: f64,
    /// Half of the peak-to-peak breathing excursion, meters.
    pub breathing_amplitude: f64,
    /// Hz.
    pub breathing_rate: f64,
    pub breathing_phase: f64,
    pub heartbeat_amplitude: f64,
    /// Hz.
    pub heartbeat_rate: f64,
    pub heartbeat_phase: f64,
    pub heartbeat_waveform: Waveform,
    /// Overrides the constant rates when present.
    pub rate_schedule: Option<RateSchedule>,
    /// Angle off the sensor boresight, radians. `None` places the subject on axis and
    /// uses the fitted distance-only power law; `Some` switches to the geometric form with
    /// a co-located, co-aligned source and detector.
    pub bearing: Option<f64>,
}

impl Default for SubjectMotion {
    /// Seated adult at 40 cm: 15 breaths/min with 1 cm excursion, 72 beats/min with 1 mm.
    fn default() -> Self {
        Self {
            rest_distance: 0.4,
            breathing_amplitude: 0.005,
            breathing_rate: 0.25,
            breathing_phase: 0.0,
            heartbeat_amplitude: 0.0005,
            heartbeat_rate: 1.2,
            heartbeat_phase: 0.0,
            heartbeat_waveform: Waveform::Sinusoid,
            rate_schedule: None,
            bearing: None,
        }
    }
}

impl SubjectMotion {
    /// Check invariants; returns plausibility warnings that do not prevent simulation.
    pub fn validate(&self) -> Result<Vec<String>> {
        let finite = [
            self.rest_distance,
            self.breathing_amplitude,
            self.breathing_rate,
            self.breathing_phase,
            self.heartbeat_amplitude,
            self.heartbeat_rate,
            self.heartbeat_phase,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("subject parameters must be finite".into()));
        }
        if self.breathing_amplitude < 0.0 || self.heartbeat_amplitude < 0.0 {
            return Err(Error::Validation("motion amplitudes must be non-negative".into()));
        }
        if self.breathing_rate <= 0.0 || self.heartbeat_rate <= 0.0 {
            return Err(Error::Validation("breathing and heart rates must be positive".into()));
        }
        if let Waveform::HarmonicTrain { relative_amplitude } = self.heartbeat_waveform {
            if !(relative_amplitude.is_finite() && relative_amplitude >= 0.0) {
                return Err(Error::Validation("harmonic amplitude must be non-negative".into()));
            }
        }
        let excursion = self.breathing_amplitude + self.heartbeat_amplitude * self.heartbeat_waveform.peak_bound();
        if self.rest_distance <= excursion {
            return Err(Error::Validation(format!(
                "rest distance {} m must exceed the peak chest excursion {excursion} m",
                self.rest_distance
            )));
        }
        if let Some(bearing) = self.bearing {
            if !(0.0..PI / 2.0).contains(&bearing.abs()) {
                return Err(Error::Validation(format!(
                    "bearing {bearing} rad must lie in (-pi/2, pi/2)"
                )));
            }
        }

        let mut warnings = Vec::new();
        let breathing_ptp = 2.0 * self.breathing_amplitude;
        let (lo, hi) = PLAUSIBLE_BREATHING_PTP;
        if !(lo..=hi).contains(&breathing_ptp) {
            warnings.push(format!(
                "breathing peak-to-peak {breathing_ptp} m is outside the typical {lo}-{hi} m"
            ));
        }
        let heart_ptp = 2.0 * self.heartbeat_amplitude;
        if heart_ptp > PLAUSIBLE_HEARTBEAT_PTP {
            warnings.push(format!(
                "heartbeat peak-to-peak {heart_ptp} m exceeds the typical {PLAUSIBLE_HEARTBEAT_PTP} m"
            ));
        }
        Ok(warnings)
    }

    /// Subject-to-sensor distance at time `t`.
    pub fn chest_displacement(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        let (breathing_cycles, heart_cycles) = match &self.rate_schedule {
            Some(schedule) => schedule.cycles_at(t),
            None => (self.breathing_rate * t, self.heartbeat_rate * t),
        };
        let breathing = (2.0 * PI * breathing_cycles + self.breathing_phase).sin();
        let heart = self
            .heartbeat_waveform
            .eval(2.0 * PI * heart_cycles + self.heartbeat_phase);
        self.rest_distance - self.breathing_amplitude * breathing - self.heartbeat_amplitude * heart
    }

    /// Instantaneous (breathing, heart) rates in BPM.
    pub fn rates_bpm_at(&self, t: f64) -> (f64, f64) {
        match &self.rate_schedule {
            Some(schedule) => schedule.rates_at(t),
            None => (self.breathing_rate * 60.0, self.heartbeat_rate * 60.0),
        }
    }

    /// Average rates over `[0, duration]` in BPM, used as the trace ground truth.
    pub fn mean_rates_bpm(&self, duration: f64) -> (f64, f64) {
        match &self.rate_schedule {
            Some(schedule) => {
                let (b, h) = schedule.cycles_at(duration);
                (b / duration * 60.0, h / duration * 60.0)
            }
            None => (self.breathing_rate * 60.0, self.heartbeat_rate * 60.0),
        }
    }
}

/// Level of the white Gaussian noise added to the received power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdditiveNoise {
    /// Absolute standard deviation, watts.
    Std(f64),
    /// Ratio of the noiseless trace variance to the noise variance, dB.
    SnrDb(f64),
}

/// A sinusoidal ambient-light component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    pub frequency: f64,
    pub amplitude: f64,
}

/// Receiver-side impairments added in the power domain.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub additive: AdditiveNoise,
    /// Slow sinusoidal baseline wander, watts.
    pub drift_amplitude: f64,
    pub drift_period: f64,
    pub interference: Vec<Tone>,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            additive: AdditiveNoise::Std(0.0),
            drift_amplitude: 0.0,
            drift_period: 60.0,
            interference: Vec::new(),
            seed: 0,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        match self.additive {
            AdditiveNoise::Std(s) if !(s.is_finite() && s >= 0.0) => {
                return Err(Error::Validation(format!("noise std must be non-negative, got {s}")));
            }
            AdditiveNoise::SnrDb(db) if !db.is_finite() => {
                return Err(Error::Validation(format!("SNR must be finite, got {db}")));
            }
            _ => {}
        }
        if !(self.drift_amplitude.is_finite() && self.drift_amplitude >= 0.0) {
            return Err(Error::Validation("drift amplitude must be non-negative".into()));
        }
        if !(self.drift_period.is_finite() && self.drift_period > 0.0) {
            return Err(Error::Validation("drift period must be positive".into()));
        }
        for tone in &self.interference {
            if !(tone.amplitude.is_finite() && tone.amplitude >= 0.0 && tone.frequency.is_finite()) {
                return Err(Error::Validation(format!("invalid interference tone {tone:?}")));
            }
        }
        Ok(())
    }
}

/// Optional uniform quantizer spanning `[0, full_scale]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantizer {
    pub bit_depth: u32,
    pub full_scale: f64,
}

impl Quantizer {
    pub fn quantize(&self, power: f64) -> f64 {
        let levels = 2f64.powi(self.bit_depth as i32);
        let lsb = self.full_scale / levels;
        (power / lsb).round().clamp(0.0, levels - 1.0) * lsb
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcModel {
    pub sampling_rate: f64,
    pub quantizer: Option<Quantizer>,
}

impl Default for AdcModel {
    fn default() -> Self {
        Self {
            sampling_rate: 100.0,
            quantizer: None,
        }
    }
}

impl AdcModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.sampling_rate.is_finite() && self.sampling_rate > MIN_SAMPLING_RATE) {
            return Err(Error::Validation(format!(
                "sampling rate {} Hz must exceed {MIN_SAMPLING_RATE:.4} Hz",
                self.sampling_rate
            )));
        }
        if let Some(q) = self.quantizer {
            if !(1..=32).contains(&q.bit_depth) {
                return Err(Error::Validation(format!("bit depth {} outside 1..=32", q.bit_depth)));
            }
            if !(q.full_scale.is_finite() && q.full_scale > 0.0) {
                return Err(Error::Validation("ADC full scale must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Simulate `duration` seconds of received power for a breathing subject.
///
/// Produces `floor(sampling_rate * duration)` samples. Noise enters after the channel
/// and before quantization. Identical inputs give bit-identical traces.
pub fn synthesize_trace(
    motion: &SubjectMotion,
    channel: &LambertianChannel,
    adc: &AdcModel,
    noise: &NoiseModel,
    duration: f64,
) -> Result<Trace> {
    motion.validate()?;
    adc.validate()?;
    noise.validate()?;
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::Validation(format!("duration must be positive, got {duration}")));
    }
    let fs = adc.sampling_rate;
    // guard against fs * duration landing just below an integer
    let count = (fs * duration * (1.0 + 1e-12)).floor() as usize;
    if count == 0 {
        return Err(Error::Validation(format!("{duration} s at {fs} Hz yields no samples")));
    }

    let mut samples = (0..count)
        .map(|m| {
            let distance = motion.chest_displacement(m as f64 / fs);
            match motion.bearing {
                Some(bearing) => channel.received_power_geometric(distance, bearing.abs(), bearing.abs()),
                None => channel.received_power_from_distance(distance),
            }
        })
        .collect::<Result<Vec<f64>>>()?;

    let noise_std = match noise.additive {
        AdditiveNoise::Std(s) => s,
        AdditiveNoise::SnrDb(db) => {
            let mean = samples.iter().sum::<f64>() / count as f64;
            let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / count as f64;
            (var / 10f64.powf(db / 10.0)).sqrt()
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let gaussian =
        Normal::new(0.0, noise_std.max(0.0)).map_err(|e| Error::Validation(format!("noise distribution: {e}")))?;
    for (m, s) in samples.iter_mut().enumerate() {
        let t = m as f64 / fs;
        if noise.drift_amplitude > 0.0 {
            *s += noise.drift_amplitude * (2.0 * PI * t / noise.drift_period).sin();
        }
        for tone in &noise.interference {
            *s += tone.amplitude * (2.0 * PI * tone.frequency * t).sin();
        }
        if noise_std > 0.0 {
            *s += gaussian.sample(&mut rng);
        }
        if let Some(q) = adc.quantizer {
            *s = q.quantize(*s);
        }
    }

    let (breathing_bpm, heart_bpm) = motion.mean_rates_bpm(count as f64 / fs);
    let mut trace = Trace::new(fs, samples)?.with_truth(GroundTruth {
        breathing_bpm,
        heart_bpm,
    })?;
    let meta: Vec<(&str, String)> = vec![
        ("generator", "vls-vitals".into()),
        ("duration_s", format!("{}", count as f64 / fs)),
        ("rest_distance_m", motion.rest_distance.to_string()),
        ("breathing_amplitude_m", motion.breathing_amplitude.to_string()),
        ("breathing_phase_rad", motion.breathing_phase.to_string()),
        ("heartbeat_amplitude_m", motion.heartbeat_amplitude.to_string()),
        ("heartbeat_phase_rad", motion.heartbeat_phase.to_string()),
        ("path_loss_exponent", channel.path_loss_exponent().to_string()),
        ("system_constant_db", channel.system_constant_db().to_string()),
        ("noise_std_w", noise_std.to_string()),
        ("seed", noise.seed.to_string()),
    ];
    for (k, v) in meta {
        trace.insert_metadata(k, v)?;
    }
    if let Some(bearing) = motion.bearing {
        trace.insert_metadata("bearing_rad", bearing.to_string())?;
    }
    if let Some(schedule) = &motion.rate_schedule {
        let knots: Vec<String> = schedule
            .knots()
            .iter()
            .map(|k| format!("{}:{}:{}", k.time, k.breathing_bpm, k.heart_bpm))
            .collect();
        trace.insert_metadata("rate_schedule", knots.join(","))?;
    }
    Ok(trace)
}
