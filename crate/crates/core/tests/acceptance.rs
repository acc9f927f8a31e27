//! Acceptance criteria AC-1 to AC-9. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any fails.

mod support;

use std::f64::consts::PI;
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use rand::RngExt;
use vls_vitals::cli::{run_sweep, run_trial, SweepParameter, SweepPoint, SweepSpec};
use vls_vitals::dsp::{
    bpm_resolution, design_bandpass, estimate_vitals, fft, hanning_window, BandSpec, ChebyshevDesign, EdgeConvention,
    FilterPreset, PipelineConfig, VitalKind,
};
use vls_vitals::io::{read_trace, write_trace, RunConfig};
use vls_vitals::metrics::ensemble_accuracy;
use vls_vitals::optics::LambertianChannel;
use vls_vitals::physio::{synthesize_trace, AdcModel, AdditiveNoise, NoiseModel, RateSchedule, SubjectMotion};

use support::{dft, fitted_amplitude, random_config, random_trace, rng, uniform};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac1() -> Outcome {
    let mut worst_bin = 0.0f64;
    let mut worst_parseval = 0.0f64;
    let mut r = rng(1);
    for n in [8usize, 64, 512, 1024, 2048, 4096] {
        for _ in 0..100 {
            let x: Vec<f64> = (0..n).map(|_| uniform(&mut r, -1.0, 1.0)).collect();
            let fast = fft(&x).map_err(|e| e.to_string())?;
            let slow = dft(&x);
            for (a, b) in fast.iter().zip(&slow) {
                worst_bin = worst_bin.max((a - b).norm() / b.norm());
            }
            let time: f64 = x.iter().map(|v| v * v).sum();
            let freq: f64 = fast.iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
            worst_parseval = worst_parseval.max((time - freq).abs() / time);
        }
    }
    check(
        worst_bin <= 1e-9 && worst_parseval <= 1e-9,
        format!("max per-bin relative error {worst_bin:.2e}, max Parseval error {worst_parseval:.2e} (limit 1e-9)"),
    )
}

fn ac2() -> Outcome {
    let mut worst = 0.0f64;
    for n in 4..=4096usize {
        let w = hanning_window(n).map_err(|e| e.to_string())?;
        if w[0] != 0.0 {
            return Err(format!("W[0] = {} for N = {n}", w[0]));
        }
        if n % 2 == 0 {
            worst = worst.max((w[n / 2] - 1.0).abs());
        }
        worst = worst.max((w.iter().sum::<f64>() - n as f64 / 2.0).abs() / (n as f64 / 2.0));
    }
    check(
        worst <= 1e-12,
        format!("N = 4..=4096: W[0] = 0, worst W[N/2] / sum deviation {worst:.2e} (limit 1e-12)"),
    )
}

fn ac3() -> Outcome {
    let fs = 100.0;
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let low = uniform(&mut r, 0.1, 5.0);
        let high = (low * uniform(&mut r, 1.5, 5.0)).min(40.0);
        let design = ChebyshevDesign {
            order: r.random_range(1..=5usize),
            stopband_db: uniform(&mut r, 25.0, 60.0),
            edges: if r.random::<bool>() {
                EdgeConvention::Passband
            } else {
                EdgeConvention::Stopband
            },
        };
        let filter = design_bandpass(&design, low, high, fs).map_err(|e| e.to_string())?;
        let stability = filter.stability();
        if !stability.is_stable() {
            return Err(format!(
                "designed filter {design:?} {low}-{high} Hz is {}",
                stability.verdict
            ));
        }
        // transient decays below 1e-10 of the input by `settle`
        let settle = (1e-10f64.ln() / stability.max_pole_modulus.ln()).ceil() as usize;
        for _ in 0..5 {
            let f = uniform(&mut r, low, high);
            let span = ((20.0 * fs / f).ceil() as usize).max(2000);
            let x: Vec<f64> = (0..settle + span)
                .map(|m| (2.0 * PI * f * m as f64 / fs).sin())
                .collect();
            let y = filter.filter(&x).map_err(|e| e.to_string())?;
            let measured = fitted_amplitude(&y, f, fs, settle..settle + span);
            let predicted = filter.frequency_response(f, fs).norm();
            worst = worst.max((measured - predicted).abs() / predicted);
        }
    }
    let heart = FilterPreset::PaperHeart.coefficients(true).map_err(|e| e.to_string())?;
    let breathing = FilterPreset::PaperBreathing
        .coefficients(true)
        .map_err(|e| e.to_string())?;
    let bs = breathing.stability();
    check(
        worst <= 1e-3 && heart.feedback().len() == 9 && breathing.feedback().len() == 5,
        format!(
            "20 filters x 5 tones, worst gain error {:.3e} % (limit 0.1 %); presets loaded; paper-breathing verdict: {} (max pole modulus {:.14}, margin {:.2e}); paper-heart verdict: {}",
            worst * 100.0,
            bs.verdict,
            bs.max_pole_modulus,
            bs.margin,
            heart.stability().verdict
        ),
    )
}

fn ac4() -> Outcome {
    let config = RunConfig::default();
    let pipeline = config.pipeline_config().map_err(|e| e.to_string())?;
    let spec = SweepSpec {
        parameter: SweepParameter::Snr,
        values: vec![20.0],
        trials: 100,
        ..SweepSpec::default()
    };
    let point = SweepPoint::Value(SweepParameter::Snr, 20.0);
    let reports = (0..spec.trials)
        .map(|t| {
            run_trial(&config, &pipeline, &spec, point, t)
                .map(|o| o.expect("on-axis subject is in view").report)
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let tolerance = bpm_resolution(&pipeline);
    let accuracy = ensemble_accuracy(&reports, tolerance).map_err(|e| e.to_string())?;
    check(
        accuracy >= 0.94,
        format!("100 trials at 20 dB SNR, d = 0.4 m, N = 2048: joint accuracy {accuracy:.2} within {tolerance} BPM (need >= 0.94)"),
    )
}

fn ac5() -> Outcome {
    let trace = synthesize_trace(
        &SubjectMotion::default(),
        &LambertianChannel::default(),
        &AdcModel::default(),
        &NoiseModel::noiseless(),
        60.0,
    )
    .map_err(|e| e.to_string())?;
    let report = estimate_vitals(&trace, &PipelineConfig::default()).map_err(|e| e.to_string())?;
    let expect = [(VitalKind::Breathing, 14.6484375), (VitalKind::Heart, 73.2421875)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (kind, want) in expect {
        let s = report.summary(kind);
        let all_equal = report.windows_of(kind).all(|w| w.bpm == want && w.confident);
        ok &= all_equal && s.mean_bpm == Some(want) && s.variance_bpm == Some(0.0);
        parts.push(format!("{kind} {:?} BPM variance {:?}", s.mean_bpm, s.variance_bpm));
    }
    check(
        ok,
        format!("{} (expected 14.6484 / 73.2422, zero variance)", parts.join(", ")),
    )
}

fn ac6() -> Outcome {
    let mut config = RunConfig::default();
    config.noise.snr_db = Some(10.0);
    let spec = SweepSpec {
        parameter: SweepParameter::WindowSize,
        values: vec![512.0, 1024.0, 2048.0],
        trials: 20,
        seed_base: 600,
        ..SweepSpec::default()
    };
    let rows = run_sweep(&config, &spec).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for kind in VitalKind::ALL {
        let v: Vec<f64> = rows.iter().map(|r| r.variance(kind).unwrap_or(f64::NAN)).collect();
        ok &= v.windows(2).all(|p| p[1] <= p[0]);
        parts.push(format!("{kind} {:.4} -> {:.4} -> {:.4} BPM^2", v[0], v[1], v[2]));
    }
    check(
        ok,
        format!("20 seeds at 10 dB SNR, N = 512/1024/2048: {}", parts.join("; ")),
    )
}

fn ac7() -> Outcome {
    let mut config = RunConfig::default();
    config.noise.std = 1e-13;
    let spec = SweepSpec {
        trials: 50,
        seed_base: 700,
        ..SweepSpec::default()
    };
    let rows = run_sweep(&config, &spec).map_err(|e| e.to_string())?;
    let power: Vec<f64> = rows.iter().map(|r| r.mean_power).collect();
    let decreasing = power.windows(2).all(|p| p[1] < p[0]);
    let heart = |i: usize| rows[i].error_pct(VitalKind::Heart).unwrap_or(f64::NAN);
    let breathing = |i: usize| rows[i].error_pct(VitalKind::Breathing).unwrap_or(f64::NAN);
    let far = rows.len() - 1;
    check(
        decreasing && heart(far) >= heart(1) && heart(far) > breathing(far),
        format!(
            "power {:.3e} -> {:.3e} W strictly decreasing: {decreasing}; heart error {:.2} % at 0.4 m, {:.2} % at 1.2 m; breathing error {:.2} % at 1.2 m (noise std 1e-13 W, 50 trials)",
            power[0],
            power[far],
            heart(1),
            heart(far),
            breathing(far)
        ),
    )
}

fn ac8() -> Outcome {
    let fs = 100.0;
    let pipeline = PipelineConfig::designed(
        fs,
        2048,
        BandSpec::new(6.0, 60.0, VitalKind::Breathing).map_err(|e| e.to_string())?,
        BandSpec::new(40.0, 240.0, VitalKind::Heart).map_err(|e| e.to_string())?,
        &ChebyshevDesign::default(),
    )
    .and_then(|p| p.with_overlap(0.5))
    .map_err(|e| e.to_string())?;
    let motion = SubjectMotion {
        rate_schedule: Some(RateSchedule::ramp(900.0, (30.0, 120.0), (12.0, 70.0)).map_err(|e| e.to_string())?),
        ..SubjectMotion::default()
    };
    let noise = NoiseModel {
        additive: AdditiveNoise::SnrDb(20.0),
        seed: 800,
        ..NoiseModel::default()
    };
    let trace = synthesize_trace(
        &motion,
        &LambertianChannel::default(),
        &AdcModel::default(),
        &noise,
        900.0,
    )
    .map_err(|e| e.to_string())?;
    let report = estimate_vitals(&trace, &pipeline).map_err(|e| e.to_string())?;
    let tolerance = report.resolution_bpm();
    let mut ok = true;
    let mut parts = Vec::new();
    for kind in VitalKind::ALL {
        let (mut hits, mut total) = (0usize, 0usize);
        for w in report.windows_of(kind) {
            let (b, h) = motion.rates_bpm_at(w.start_time + report.window_seconds() / 2.0);
            let truth = if kind == VitalKind::Breathing { b } else { h };
            hits += usize::from((w.bpm - truth).abs() <= tolerance);
            total += 1;
        }
        let fraction = hits as f64 / total as f64;
        ok &= fraction >= 0.9;
        parts.push(format!("{kind} {hits}/{total} ({:.1} %)", fraction * 100.0));
    }
    check(
        ok,
        format!(
            "900 s ramp, 50 % overlap, bands 6-60 / 40-240 BPM, 20 dB SNR: {} within one bin (need >= 90 %)",
            parts.join(", ")
        ),
    )
}

fn ac9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut r = rng(9);
    for i in 0..200 {
        let trace = random_trace(&mut r);
        let path = dir.path().join("t.trace");
        write_trace(&trace, &path).map_err(|e| e.to_string())?;
        let back = read_trace(&path).map_err(|e| e.to_string())?;
        if back != trace {
            return Err(format!("trace instance {i} did not round-trip"));
        }
        let config = random_config(&mut r);
        let text = config.to_ini_string();
        let parsed = RunConfig::from_ini_str(&text, "generated").map_err(|e| format!("config {i}: {e}"))?;
        if parsed != config || parsed.to_ini_string() != text {
            return Err(format!("config instance {i} did not round-trip"));
        }
    }

    let vls = env!("CARGO_BIN_EXE_vls");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let csv = dir.path().join(format!("sweep{run}.csv"));
        let trace = dir.path().join(format!("sim{run}.trace"));
        let status = Command::new(vls)
            .args(["--seed", "42", "sweep", "--trials", "3", "--csv"])
            .arg(&csv)
            .stdout(Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        let sim = Command::new(vls)
            .args(["--seed", "42", "simulate", "--snr", "15", "-o"])
            .arg(&trace)
            .stdout(Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() || !sim.success() {
            return Err("vls exited with failure".into());
        }
        let read = |p: &std::path::Path| std::fs::read(p).map_err(|e| e.to_string());
        outputs.push((read(&csv)?, read(&trace)?));
    }
    check(
        outputs[0] == outputs[1],
        "200 traces and 200 configs round-trip exactly; repeated seeded sweep CSV and simulated trace are byte-identical".into(),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC-1", ac1, Duration::from_secs(10)),
        ("AC-2", ac2, Duration::from_secs(1)),
        ("AC-3", ac3, Duration::from_secs(10)),
        ("AC-4", ac4, Duration::from_secs(60)),
        ("AC-5", ac5, Duration::from_secs(1)),
        ("AC-6", ac6, Duration::from_secs(60)),
        ("AC-7", ac7, Duration::from_secs(120)),
        ("AC-8", ac8, Duration::from_secs(60)),
        ("AC-9", ac9, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) => (elapsed <= limit, d),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "{name} {}: {detail} [{:.2} s, limit {} s]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
