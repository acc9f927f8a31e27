//! Received-power traces and their line-oriented text format.
//!
//! ```text
//! # format_version=1
//! # fs=100
//! # unit=W
//! # truth_breathing_bpm=15
//! # truth_heart_bpm=72
//! # seed=7
//! 1.4741095103107798e-10
//! 1.4741283012553617e-10
//! ```
//!
//! Header lines start with `#` and carry one `key=value` pair each; `fs` is mandatory.
//! Keys other than the reserved ones are kept verbatim in [`Trace::metadata`]. The body
//! holds one sample per line in shortest round-trip decimal form, so a write/read cycle
//! reproduces every sample bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const TRACE_FORMAT_VERSION: u32 = 1;

const KEY_VERSION: &str = "format_version";
const KEY_FS: &str = "fs";
const KEY_UNIT: &str = "unit";
const KEY_TRUTH_BREATHING: &str = "truth_breathing_bpm";
const KEY_TRUTH_HEART: &str = "truth_heart_bpm";
const RESERVED: [&str; 5] = [KEY_VERSION, KEY_FS, KEY_UNIT, KEY_TRUTH_BREATHING, KEY_TRUTH_HEART];

/// True breathing and heart rates stored alongside a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    pub breathing_bpm: f64,
    pub heart_bpm: f64,
}

/// Uniformly sampled received-power time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    sampling_rate: f64,
    samples: Vec<f64>,
    unit: String,
    metadata: BTreeMap<String, String>,
    truth: Option<GroundTruth>,
}

impl Trace {
    /// Trace in watts. Rejects non-positive sampling rates, empty and non-finite samples.
    pub fn new(sampling_rate: f64, samples: Vec<f64>) -> Result<Self> {
        if !(sampling_rate.is_finite() && sampling_rate > 0.0) {
            return Err(Error::Validation(format!(
                "sampling rate must be positive, got {sampling_rate}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::Validation("trace has no samples".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Validation(format!("sample {i} is not finite: {}", samples[i])));
        }
        Ok(Self {
            sampling_rate,
            samples,
            unit: "W".into(),
            metadata: BTreeMap::new(),
            truth: None,
        })
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Result<Self> {
        let unit = unit.into();
        check_value(KEY_UNIT, &unit)?;
        self.unit = unit;
        Ok(self)
    }

    pub fn with_truth(mut self, truth: GroundTruth) -> Result<Self> {
        for (name, bpm) in [("breathing", truth.breathing_bpm), ("heart", truth.heart_bpm)] {
            if !(bpm.is_finite() && bpm > 0.0) {
                return Err(Error::Validation(format!("{name} truth must be positive, got {bpm}")));
            }
        }
        self.truth = Some(truth);
        Ok(self)
    }

    /// Attach a free-form metadata entry. Reserved header keys are refused.
    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Result<Self> {
        self.insert_metadata(key, value)?;
        Ok(self)
    }

    pub fn insert_metadata(&mut self, key: impl Into<String>, value: impl Into<String>) -> Result<()> {
        let key = key.into();
        let value = value.into();
        check_key(&key)?;
        if RESERVED.contains(&key.as_str()) {
            return Err(Error::Validation(format!("metadata key `{key}` is reserved")));
        }
        check_value(&key, &value)?;
        self.metadata.insert(key, value);
        Ok(())
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampling_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn truth(&self) -> Option<GroundTruth> {
        self.truth
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sampling_rate
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Copy of the trace with every sample multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = self.clone();
        out.samples.iter_mut().for_each(|s| *s *= factor);
        if out.samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::Validation(format!("scaling by {factor} overflows")));
        }
        Ok(out)
    }

    /// Drop the first `seconds` of the trace (warm-up discard).
    pub fn skip_seconds(&self, seconds: f64) -> Result<Self> {
        if !(seconds.is_finite() && seconds >= 0.0) {
            return Err(Error::Validation(format!(
                "warm-up must be non-negative, got {seconds}"
            )));
        }
        let skip = (seconds * self.sampling_rate).round() as usize;
        if skip >= self.samples.len() {
            return Err(Error::Validation(format!(
                "warm-up of {seconds} s consumes the whole {:.3} s trace",
                self.duration()
            )));
        }
        let mut out = self.clone();
        out.samples.drain(..skip);
        Ok(out)
    }

    /// Serialize to the text format.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 24 + 256);
        let _ = writeln!(out, "# {KEY_VERSION}={TRACE_FORMAT_VERSION}");
        let _ = writeln!(out, "# {KEY_FS}={}", self.sampling_rate);
        let _ = writeln!(out, "# {KEY_UNIT}={}", self.unit);
        if let Some(truth) = self.truth {
            let _ = writeln!(out, "# {KEY_TRUTH_BREATHING}={}", truth.breathing_bpm);
            let _ = writeln!(out, "# {KEY_TRUTH_HEART}={}", truth.heart_bpm);
        }
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        for s in &self.samples {
            let _ = writeln!(out, "{s:e}");
        }
        out
    }

    /// Parse the text format. `origin` is only used in error messages.
    pub fn from_text(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };

        let mut header: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut samples = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            if let Some(rest) = raw.strip_prefix('#') {
                if !samples.is_empty() {
                    return Err(err(line_no, "header line after the first sample".into()));
                }
                let rest = rest.trim_start();
                let (key, value) = rest
                    .split_once('=')
                    .ok_or_else(|| err(line_no, format!("header line without `key=value`: `{raw}`")))?;
                let key = key.trim();
                if key.is_empty() {
                    return Err(err(line_no, "empty header key".into()));
                }
                if header.insert(key.to_string(), (line_no, value.to_string())).is_some() {
                    return Err(err(line_no, format!("duplicate header key `{key}`")));
                }
            } else if raw.trim().is_empty() {
                continue;
            } else {
                let value: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| err(line_no, format!("sample is not a number: `{}`", raw.trim())))?;
                if !value.is_finite() {
                    return Err(err(line_no, format!("sample is not finite: `{}`", raw.trim())));
                }
                samples.push(value);
            }
        }

        let last_line = text.lines().count().max(1);
        let number = |key: &str| -> Result<Option<f64>> {
            header
                .get(key)
                .map(|(line, v)| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| err(*line, format!("`{key}` is not a number: `{v}`")))
                })
                .transpose()
        };

        if let Some((line, v)) = header.get(KEY_VERSION) {
            if v.trim() != TRACE_FORMAT_VERSION.to_string() {
                return Err(err(*line, format!("unsupported format_version `{v}`")));
            }
        }
        let fs = number(KEY_FS)?.ok_or_else(|| err(1, format!("missing mandatory header key `{KEY_FS}`")))?;
        if samples.is_empty() {
            return Err(err(last_line, "trace has no samples".into()));
        }
        let fs_line = header[KEY_FS].0;
        let mut trace = Trace::new(fs, samples).map_err(|e| err(fs_line, e.to_string()))?;
        if let Some((_, unit)) = header.get(KEY_UNIT) {
            trace.unit = unit.clone();
        }
        match (number(KEY_TRUTH_BREATHING)?, number(KEY_TRUTH_HEART)?) {
            (Some(breathing_bpm), Some(heart_bpm)) => {
                let line = header[KEY_TRUTH_BREATHING].0;
                trace = trace
                    .with_truth(GroundTruth {
                        breathing_bpm,
                        heart_bpm,
                    })
                    .map_err(|e| err(line, e.to_string()))?;
            }
            (None, None) => {}
            (Some(_), None) | (None, Some(_)) => {
                let line = header
                    .get(KEY_TRUTH_BREATHING)
                    .or_else(|| header.get(KEY_TRUTH_HEART))
                    .map_or(1, |(line, _)| *line);
                return Err(err(line, "truth requires both breathing and heart rates".into()));
            }
        }
        for (key, (_, value)) in header {
            if !RESERVED.contains(&key.as_str()) {
                trace.metadata.insert(key, value);
            }
        }
        Ok(trace)
    }
}

/// Write a trace file. I/O failures carry the destination path.
pub fn write_trace(trace: &Trace, destination: impl AsRef<Path>) -> Result<()> {
    let path = destination.as_ref();
    // the constructor guarantees this; kept so hand-edited clones cannot slip through
    if trace.samples.is_empty() {
        return Err(Error::Validation("refusing to write an empty trace".into()));
    }
    fs::write(path, trace.to_text()).map_err(|e| Error::io(path, e))
}

pub fn read_trace(source: impl AsRef<Path>) -> Result<Trace> {
    let path = source.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Trace::from_text(&text, path)
}

fn check_key(key: &str) -> Result<()> {
    if key.is_empty() || key.contains('=') || key.chars().any(char::is_whitespace) {
        return Err(Error::Validation(format!(
            "metadata key `{key}` must be non-empty without `=` or whitespace"
        )));
    }
    Ok(())
}

fn check_value(key: &str, value: &str) -> Result<()> {
    if value.contains(['\n', '\r']) {
        return Err(Error::Validation(format!("value for `{key}` contains a line break")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<Trace> {
        Trace::from_text(text, Path::new("test.trace"))
    }

    #[test]
    fn minimal_file() {
        let trace = parse("# fs=100\n1.5\n-2\n").unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(trace.sampling_rate(), 100.0);
        assert_eq!(trace.samples(), &[1.5, -2.0]);
        assert_eq!(trace.unit(), "W");
        assert!(trace.truth().is_none());
    }

    #[test]
    fn missing_fs_names_the_key() {
        let e = parse("# unit=W\n1\n2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        assert!(e.to_string().contains("`fs`"), "{e}");
    }

    #[test]
    fn bad_sample_reports_line() {
        match parse("# fs=10\n1\nabc\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        for bad in ["NaN", "inf", "-inf"] {
            match parse(&format!("# fs=10\n1\n{bad}\n")).unwrap_err() {
                Error::Parse { line, .. } => assert_eq!(line, 3),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn malformed_header_is_rejected() {
        assert!(matches!(parse("# fs 100\n1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("# fs=abc\n1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse("# fs=100\n# fs=50\n1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse("# format_version=2\n# fs=100\n1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse("# fs=100\n1\n# late=1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(parse("# fs=100\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse("# fs=0\n1\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn truth_appears_in_header() {
        let trace = Trace::new(100.0, vec![1.0, 2.0])
            .unwrap()
            .with_truth(GroundTruth {
                breathing_bpm: 15.0,
                heart_bpm: 72.0,
            })
            .unwrap();
        let text = trace.to_text();
        assert!(text.contains("# truth_breathing_bpm=15\n"));
        assert!(text.contains("# truth_heart_bpm=72\n"));
        assert_eq!(parse(&text).unwrap(), trace);
    }

    #[test]
    fn half_truth_is_rejected() {
        assert!(parse("# fs=100\n# truth_heart_bpm=72\n1\n").is_err());
    }

    #[test]
    fn unknown_keys_are_preserved() {
        let trace = parse("# fs=100\n# subject=alice smith\n# distance_m=0.4\n1\n").unwrap();
        assert_eq!(trace.metadata()["subject"], "alice smith");
        assert_eq!(trace.metadata()["distance_m"], "0.4");
        assert_eq!(parse(&trace.to_text()).unwrap(), trace);
    }

    #[test]
    fn empty_samples_refused() {
        assert!(matches!(Trace::new(100.0, vec![]), Err(Error::Validation(_))));
    }

    #[test]
    fn reserved_metadata_refused() {
        let t = Trace::new(1.0, vec![1.0]).unwrap();
        assert!(t.clone().with_metadata("fs", "3").is_err());
        assert!(t.clone().with_metadata("bad key", "3").is_err());
        assert!(t.with_metadata("ok", "multi\nline").is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.trace");
        let trace = Trace::new(100.0, (0..6000).map(|i| (i as f64 * 0.37).sin() * 1e-10).collect())
            .unwrap()
            .with_metadata("seed", "3")
            .unwrap();
        write_trace(&trace, &path).unwrap();
        assert_eq!(read_trace(&path).unwrap(), trace);
    }

    #[test]
    fn missing_file_is_io_error_with_path() {
        let e = read_trace("/nonexistent/dir/x.trace").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("/nonexistent/dir/x.trace"));
    }

    #[test]
    fn skip_seconds_drops_warmup() {
        let t = Trace::new(10.0, (0..100).map(f64::from).collect()).unwrap();
        let s = t.skip_seconds(2.0).unwrap();
        assert_eq!(s.len(), 80);
        assert_eq!(s.samples()[0], 20.0);
        assert!(t.skip_seconds(10.0).is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(
            fs in 1e-3f64..1e6,
            samples in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 1..64),
            truth in prop::option::of((1e-3f64..300.0, 1e-3f64..300.0)),
            meta in prop::collection::btree_map("[a-z_][a-z0-9_.]{0,8}", "[ -~]{0,16}", 0..4),
        ) {
            let mut trace = Trace::new(fs, samples).unwrap();
            if let Some((b, h)) = truth {
                trace = trace.with_truth(GroundTruth { breathing_bpm: b, heart_bpm: h }).unwrap();
            }
            for (k, v) in meta {
                if RESERVED.contains(&k.as_str()) { continue; }
                trace.insert_metadata(k, v).unwrap();
            }
            let back = parse(&trace.to_text()).unwrap();
            prop_assert_eq!(back, trace);
        }
    }
}
