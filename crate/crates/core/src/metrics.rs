//! Accuracy arithmetic: per-window aggregation, absolute error percentage and
//! within-tolerance accuracy over trial ensembles.
//!
//! Variances are population variances (divide by the window count): they describe one
//! fixed measurement, not an estimate of a wider population.

use crate::dsp::VitalKind;
use crate::error::{Error, Result};

/// Rate estimate from one window for one vital kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowEstimate {
    pub window: usize,
    /// Seconds from the start of the trace to the first sample of the window.
    pub start_time: f64,
    pub kind: VitalKind,
    pub bin: usize,
    pub bpm: f64,
    pub magnitude: f64,
    /// False when the in-band peak did not stand out from the band median.
    pub confident: bool,
}

/// Aggregate for one vital kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KindSummary {
    /// Mean over confident windows; `None` when every window was flagged.
    pub mean_bpm: Option<f64>,
    pub variance_bpm: Option<f64>,
    /// Mean over all windows, flagged or not (plain argmax behaviour).
    pub raw_mean_bpm: f64,
    pub raw_variance_bpm: f64,
    pub confident_windows: usize,
    pub reference_bpm: Option<f64>,
    /// Error of `mean_bpm` against `reference_bpm`, percent.
    pub error_pct: Option<f64>,
}

impl KindSummary {
    fn from_estimates<'a>(estimates: impl Iterator<Item = &'a WindowEstimate>) -> Self {
        let all: Vec<&WindowEstimate> = estimates.collect();
        let raw: Vec<f64> = all.iter().map(|e| e.bpm).collect();
        let confident: Vec<f64> = all.iter().filter(|e| e.confident).map(|e| e.bpm).collect();
        Self {
            mean_bpm: mean(&confident),
            variance_bpm: population_variance(&confident),
            raw_mean_bpm: mean(&raw).unwrap_or(f64::NAN),
            raw_variance_bpm: population_variance(&raw).unwrap_or(f64::NAN),
            confident_windows: confident.len(),
            reference_bpm: None,
            error_pct: None,
        }
    }

    /// Absolute error of the raw mean against the reference, percent.
    pub fn raw_error_pct(&self) -> Option<f64> {
        self.reference_bpm
            .and_then(|r| absolute_error_pct(self.raw_mean_bpm, r).ok())
    }
}

/// Per-window estimates plus per-kind aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct VitalsReport {
    windows: Vec<WindowEstimate>,
    resolution_bpm: f64,
    window_seconds: f64,
    breathing: KindSummary,
    heart: KindSummary,
}

impl VitalsReport {
    pub fn from_windows(windows: Vec<WindowEstimate>, resolution_bpm: f64, window_seconds: f64) -> Self {
        let breathing = KindSummary::from_estimates(windows.iter().filter(|w| w.kind == VitalKind::Breathing));
        let heart = KindSummary::from_estimates(windows.iter().filter(|w| w.kind == VitalKind::Heart));
        Self {
            windows,
            resolution_bpm,
            window_seconds,
            breathing,
            heart,
        }
    }

    /// Attach a reference rate and compute the error percentage against it.
    pub fn set_reference(&mut self, kind: VitalKind, reference_bpm: f64) -> Result<()> {
        if !(reference_bpm.is_finite() && reference_bpm > 0.0) {
            return Err(Error::Domain(format!(
                "reference rate must be positive, got {reference_bpm}"
            )));
        }
        let summary = self.summary_mut(kind);
        summary.reference_bpm = Some(reference_bpm);
        summary.error_pct = summary
            .mean_bpm
            .map(|m| absolute_error_pct(m, reference_bpm))
            .transpose()?;
        Ok(())
    }

    pub fn windows(&self) -> &[WindowEstimate] {
        &self.windows
    }

    pub fn windows_of(&self, kind: VitalKind) -> impl Iterator<Item = &WindowEstimate> {
        self.windows.iter().filter(move |w| w.kind == kind)
    }

    pub fn window_count(&self) -> usize {
        self.windows_of(VitalKind::Breathing).count()
    }

    /// Width of one FFT bin in BPM.
    pub fn resolution_bpm(&self) -> f64 {
        self.resolution_bpm
    }

    pub fn window_seconds(&self) -> f64 {
        self.window_seconds
    }

    pub fn summary(&self, kind: VitalKind) -> &KindSummary {
        match kind {
            VitalKind::Breathing => &self.breathing,
            VitalKind::Heart => &self.heart,
        }
    }

    fn summary_mut(&mut self, kind: VitalKind) -> &mut KindSummary {
        match kind {
            VitalKind::Breathing => &mut self.breathing,
            VitalKind::Heart => &mut self.heart,
        }
    }

    pub fn mean_bpm(&self, kind: VitalKind) -> Option<f64> {
        self.summary(kind).mean_bpm
    }
}

/// `100 * |estimate - reference| / reference`.
pub fn absolute_error_pct(estimate: f64, reference: f64) -> Result<f64> {
    if !(reference.is_finite() && reference > 0.0) {
        return Err(Error::Domain(format!("reference must be positive, got {reference}")));
    }
    Ok(100.0 * (estimate - reference).abs() / reference)
}

/// Fraction of trials in which both kinds are within `tolerance_bpm` of their reference.
///
/// A kind with no confident window counts as a miss.
pub fn ensemble_accuracy(trials: &[VitalsReport], tolerance_bpm: f64) -> Result<f64> {
    if trials.is_empty() {
        return Err(Error::Validation("ensemble has no trials".into()));
    }
    let mut hits = 0usize;
    for (i, trial) in trials.iter().enumerate() {
        let mut ok = true;
        for kind in VitalKind::ALL {
            let s = trial.summary(kind);
            let reference = s
                .reference_bpm
                .ok_or_else(|| Error::Validation(format!("trial {i} has no {kind} reference")))?;
            ok &= s.mean_bpm.is_some_and(|m| (m - reference).abs() <= tolerance_bpm);
        }
        hits += usize::from(ok);
    }
    Ok(hits as f64 / trials.len() as f64)
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn population_variance(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    Some(values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn est(window: usize, kind: VitalKind, bpm: f64, confident: bool) -> WindowEstimate {
        WindowEstimate {
            window,
            start_time: 0.0,
            kind,
            bin: 0,
            bpm,
            magnitude: 1.0,
            confident,
        }
    }

    fn report(breathing: f64, heart: f64, reference: (f64, f64)) -> VitalsReport {
        let mut r = VitalsReport::from_windows(
            vec![
                est(0, VitalKind::Breathing, breathing, true),
                est(0, VitalKind::Heart, heart, true),
            ],
            2.9296875,
            20.48,
        );
        r.set_reference(VitalKind::Breathing, reference.0).unwrap();
        r.set_reference(VitalKind::Heart, reference.1).unwrap();
        r
    }

    #[test]
    fn error_examples() {
        assert_eq!(absolute_error_pct(72.0, 72.0).unwrap(), 0.0);
        assert_relative_eq!(
            absolute_error_pct(70.0, 72.0).unwrap(),
            2.777_777_777_777_778,
            max_relative = 1e-12
        );
        // bin-quantized breathing estimate against 15 BPM
        assert_relative_eq!(
            absolute_error_pct(14.6484375, 15.0).unwrap(),
            2.34375,
            max_relative = 1e-12
        );
        assert_relative_eq!(absolute_error_pct(14.6484, 15.0).unwrap(), 2.344, max_relative = 1e-4);
        assert!(absolute_error_pct(1.0, 0.0).is_err());
        assert!(absolute_error_pct(1.0, -3.0).is_err());
    }

    #[test]
    fn aggregates_skip_flagged_windows() {
        let windows = vec![
            est(0, VitalKind::Heart, 70.0, true),
            est(1, VitalKind::Heart, 74.0, true),
            est(2, VitalKind::Heart, 150.0, false),
            est(0, VitalKind::Breathing, 12.0, false),
        ];
        let r = VitalsReport::from_windows(windows, 1.0, 1.0);
        let h = r.summary(VitalKind::Heart);
        assert_eq!(h.mean_bpm, Some(72.0));
        assert_eq!(h.variance_bpm, Some(4.0));
        assert_relative_eq!(h.raw_mean_bpm, 98.0);
        assert_eq!(h.confident_windows, 2);
        let b = r.summary(VitalKind::Breathing);
        assert_eq!(b.mean_bpm, None);
        assert_eq!(b.raw_mean_bpm, 12.0);
    }

    #[test]
    fn accuracy_examples() {
        let exact = report(15.0, 72.0, (15.0, 72.0));
        let off = report(15.0, 80.0, (15.0, 72.0));
        assert_eq!(ensemble_accuracy(&[exact.clone(), exact.clone()], 1.0).unwrap(), 1.0);
        assert_eq!(ensemble_accuracy(&[exact.clone(), off], 1.0).unwrap(), 0.5);
        assert!(ensemble_accuracy(&[], 1.0).is_err());
        let no_ref = VitalsReport::from_windows(vec![est(0, VitalKind::Heart, 1.0, true)], 1.0, 1.0);
        assert!(ensemble_accuracy(&[no_ref], 1.0).is_err());
    }

    proptest! {
        #[test]
        fn error_symmetric_in_sign(reference in 1.0f64..300.0, delta in 0.0f64..50.0) {
            let up = absolute_error_pct(reference + delta, reference).unwrap();
            let down = absolute_error_pct(reference - delta, reference).unwrap();
            prop_assert!((up - down).abs() <= 1e-9 * up.max(1.0));
        }

        #[test]
        fn error_is_unit_free(estimate in 1.0f64..300.0, reference in 1.0f64..300.0) {
            let bpm = absolute_error_pct(estimate, reference).unwrap();
            let hz = absolute_error_pct(estimate / 60.0, reference / 60.0).unwrap();
            prop_assert!((bpm - hz).abs() <= 1e-9 * bpm.max(1.0));
        }

        #[test]
        fn accuracy_monotone_in_tolerance(
            errs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..20),
            t1 in 0.0f64..12.0,
            t2 in 0.0f64..12.0,
        ) {
            let trials: Vec<VitalsReport> = errs.iter().map(|(b, h)| report(15.0 + b, 72.0 + h, (15.0, 72.0))).collect();
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(ensemble_accuracy(&trials, lo).unwrap() <= ensemble_accuracy(&trials, hi).unwrap());
        }

        #[test]
        fn mean_matches_confident_windows(values in prop::collection::vec((1.0f64..200.0, any::<bool>()), 1..30)) {
            let windows: Vec<WindowEstimate> = values
                .iter()
                .enumerate()
                .map(|(i, &(bpm, ok))| est(i, VitalKind::Heart, bpm, ok))
                .collect();
            let r = VitalsReport::from_windows(windows, 1.0, 1.0);
            let confident: Vec<f64> = values.iter().filter(|v| v.1).map(|v| v.0).collect();
            let s = r.summary(VitalKind::Heart);
            match mean(&confident) {
                Some(m) => prop_assert!((s.mean_bpm.unwrap() - m).abs() <= 1e-12 * m),
                None => prop_assert!(s.mean_bpm.is_none()),
            }
            prop_assert!(s.variance_bpm.unwrap_or(0.0) >= 0.0);
        }
    }
}
