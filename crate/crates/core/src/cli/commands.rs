use std::fmt::Write as _;
use std::path::Path;

use crate::dsp::{estimate_vitals, Stability, VitalKind};
use crate::error::Result;
use crate::io::{read_trace, write_trace, RunConfig, Trace};
use crate::metrics::VitalsReport;
use crate::physio::synthesize_trace;

/// Result of `simulate`.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub trace: Trace,
    /// Plausibility warnings about the subject parameters.
    pub warnings: Vec<String>,
}

impl Simulation {
    pub fn summary(&self) -> String {
        let t = &self.trace;
        let mut out = format!(
            "duration {} s, {} samples at {} Hz",
            t.duration(),
            t.len(),
            t.sampling_rate()
        );
        if let Some(truth) = t.truth() {
            let _ = write!(
                out,
                "\ntrue breathing rate {} BPM, true heart rate {} BPM",
                truth.breathing_bpm, truth.heart_bpm
            );
        }
        out
    }
}

/// Simulate the configured subject.
pub fn simulate(config: &RunConfig) -> Result<Simulation> {
    config.validate()?;
    let motion = config.subject_motion()?;
    let warnings = motion.validate()?;
    let trace = synthesize_trace(
        &motion,
        &config.channel()?,
        &config.adc(),
        &config.noise_model(),
        config.acquisition.duration,
    )?;
    Ok(Simulation { trace, warnings })
}

/// Simulate and write the trace to `output`.
pub fn cmd_simulate(config: &RunConfig, output: &Path) -> Result<Simulation> {
    let sim = simulate(config)?;
    write_trace(&sim.trace, output)?;
    Ok(sim)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EstimateOptions {
    /// Overrides the configured window size.
    pub window_size: Option<usize>,
    /// Seconds dropped from the start of the trace.
    pub warmup: f64,
}

/// Run the pipeline over `trace` at the trace's own sampling rate.
pub fn estimate(trace: &Trace, config: &RunConfig, options: &EstimateOptions) -> Result<VitalsReport> {
    let mut pipeline = config.pipeline_config_at(trace.sampling_rate())?;
    if let Some(n) = options.window_size {
        pipeline = pipeline.with_window_size(n)?;
    }
    let trace = if options.warmup > 0.0 {
        trace.skip_seconds(options.warmup)?
    } else {
        trace.clone()
    };
    estimate_vitals(&trace, &pipeline)
}

pub fn cmd_estimate(trace_path: &Path, config: &RunConfig, options: &EstimateOptions) -> Result<VitalsReport> {
    let trace = read_trace(trace_path)?;
    estimate(&trace, config, options)
}

/// Human-readable report: per-window rates, then one aggregate line per kind.
///
/// Windows whose peak did not pass the confidence test are marked `*` and left out of
/// the aggregates.
pub fn format_report(report: &VitalsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} windows of {} s, bin width {} BPM",
        report.window_count(),
        report.window_seconds(),
        report.resolution_bpm()
    );
    let _ = writeln!(out, "window  start_s  breathing_bpm  heart_bpm");
    let breathing: Vec<_> = report.windows_of(VitalKind::Breathing).collect();
    let heart: Vec<_> = report.windows_of(VitalKind::Heart).collect();
    let mark = |ok: bool| if ok { " " } else { "*" };
    for (b, h) in breathing.iter().zip(&heart) {
        let _ = writeln!(
            out,
            "{:>6}  {:>7}  {:>12}{}  {:>9}{}",
            b.window,
            b.start_time,
            b.bpm,
            mark(b.confident),
            h.bpm,
            mark(h.confident)
        );
    }
    for kind in VitalKind::ALL {
        let s = report.summary(kind);
        let _ = write!(out, "{kind}: ");
        match (s.mean_bpm, s.variance_bpm) {
            (Some(m), Some(v)) => {
                let _ = write!(out, "mean {m} BPM, variance {v} BPM^2");
            }
            _ => {
                let _ = write!(out, "no confident window (raw mean {} BPM)", s.raw_mean_bpm);
            }
        }
        if let Some(reference) = s.reference_bpm {
            let _ = write!(out, ", reference {reference} BPM");
        }
        if let Some(err) = s.error_pct {
            let _ = write!(out, ", error {err} %");
        }
        out.push('\n');
    }
    out
}

/// Per-window CSV rows.
pub fn report_csv(report: &VitalsReport) -> String {
    let mut out = String::from("window,start_s,kind,bin,bpm,magnitude,confident\n");
    for w in report.windows() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:e},{}",
            w.window, w.start_time, w.kind, w.bin, w.bpm, w.magnitude, w.confident
        );
    }
    out
}

/// Magnitude response on a uniform grid plus the filter's stability.
#[derive(Debug, Clone)]
pub struct Response {
    pub label: String,
    /// `(hz, bpm, db)` rows from 0 to Nyquist inclusive.
    pub rows: Vec<(f64, f64, f64)>,
    pub stability: Stability,
}

impl Response {
    pub fn csv(&self) -> String {
        let mut out = String::from("frequency_hz,frequency_bpm,magnitude_db\n");
        for (hz, bpm, db) in &self.rows {
            let _ = writeln!(out, "{hz},{bpm},{db}");
        }
        out
    }

    pub fn verdict_line(&self) -> String {
        let s = &self.stability;
        format!(
            "{}: {} (max pole modulus {}, margin {:e})",
            self.label, s.verdict, s.max_pole_modulus, s.margin
        )
    }
}

/// Response of the configured filter for `kind`, evaluated at `points` frequencies.
///
/// Unstable coefficients are analysed rather than refused; the verdict says so.
pub fn cmd_response(config: &RunConfig, kind: VitalKind, points: usize) -> Result<Response> {
    config.validate()?;
    let fs = config.acquisition.sampling_rate;
    let filter = config.filter_for(kind, fs, true)?;
    let points = points.max(2);
    let rows = (0..points)
        .map(|i| {
            let hz = fs / 2.0 * i as f64 / (points - 1) as f64;
            let db = 20.0 * filter.frequency_response(hz, fs).norm().log10();
            (hz, hz * 60.0, db)
        })
        .collect();
    Ok(Response {
        label: filter.label().to_string(),
        rows,
        stability: filter.stability(),
    })
}
