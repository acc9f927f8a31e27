//! Seeded generators and numerical oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vls_vitals::cli::{GridAxis, SweepParameter, SweepSpec};
use vls_vitals::dsp::EdgeConvention;
use vls_vitals::io::{
    AcquisitionSettings, ChannelSettings, FilterChoice, GroundTruth, NoiseSettings, PipelineSettings, RunConfig,
    SubjectSettings, Trace,
};
use vls_vitals::physio::{RateKnot, Tone};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn maybe<T>(rng: &mut ChaCha8Rng, value: impl FnOnce(&mut ChaCha8Rng) -> T) -> Option<T> {
    if rng.random::<bool>() {
        Some(value(rng))
    } else {
        None
    }
}

/// Brute-force `X[k] = sum_m x[m] e^{-j 2 pi k m / N}` with an exact twiddle table.
pub fn dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let twiddles: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64))
        .collect();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for &v in x {
                acc += twiddles[idx] * v;
                idx += k;
                if idx >= n {
                    idx -= n;
                }
            }
            acc
        })
        .collect()
}

/// Amplitude of the steady-state sinusoid at `freq` in `y`, fitted by least squares on
/// `sin`, `cos` and a constant over the given sample range.
pub fn fitted_amplitude(y: &[f64], freq: f64, fs: f64, range: std::ops::Range<usize>) -> f64 {
    // normal equations for [sin, cos, 1]
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for m in range {
        let w = 2.0 * PI * freq * m as f64 / fs;
        let row = [w.sin(), w.cos(), 1.0];
        for i in 0..3 {
            aty[i] += row[i] * y[m];
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let a = nalgebra::Matrix3::from_fn(|i, j| ata[i][j]);
    let b = nalgebra::Vector3::from_fn(|i, _| aty[i]);
    let coef = a.lu().solve(&b).expect("regression matrix is regular");
    coef[0].hypot(coef[1])
}

pub fn random_trace(rng: &mut ChaCha8Rng) -> Trace {
    let len = rng.random_range(1..400usize);
    let samples: Vec<f64> = (0..len)
        .map(|_| {
            let mantissa = uniform(rng, -1.0, 1.0);
            let exponent = rng.random_range(-300..300i32);
            mantissa * 10f64.powi(exponent)
        })
        .collect();
    let fs = uniform(rng, 1e-3, 1e5);
    let mut trace = Trace::new(fs, samples).unwrap();
    if rng.random::<bool>() {
        trace = trace
            .with_unit(["W", "normalized", "mW"][rng.random_range(0..3usize)])
            .unwrap();
    }
    if rng.random::<bool>() {
        trace = trace
            .with_truth(GroundTruth {
                breathing_bpm: uniform(rng, 5.0, 60.0),
                heart_bpm: uniform(rng, 30.0, 220.0),
            })
            .unwrap();
    }
    for i in 0..rng.random_range(0..5usize) {
        let value = format!("v{}:{} x={}", i, rng.random::<u32>(), uniform(rng, -1e9, 1e9));
        trace
            .insert_metadata(format!("meta_{i}_{}", rng.random::<u16>()), value)
            .unwrap();
    }
    trace
}

/// A random configuration that passes validation.
pub fn random_config(rng: &mut ChaCha8Rng) -> RunConfig {
    let filters = [
        FilterChoice::Designed,
        FilterChoice::PaperHeart,
        FilterChoice::PaperBreathing,
        FilterChoice::Identity,
    ];
    let pipeline = PipelineSettings {
        window_size: 1 << rng.random_range(6..13u32),
        window_overlap: uniform(rng, 0.0, 0.9),
        breathing_low_bpm: uniform(rng, 5.0, 15.0),
        breathing_high_bpm: uniform(rng, 20.0, 60.0),
        heart_low_bpm: uniform(rng, 25.0, 50.0),
        heart_high_bpm: uniform(rng, 100.0, 240.0),
        breathing_filter: filters[rng.random_range(0..4usize)],
        heart_filter: filters[rng.random_range(0..4usize)],
        filter_order: rng.random_range(1..9usize),
        stopband_db: uniform(rng, 20.0, 80.0),
        filter_edges: if rng.random::<bool>() {
            EdgeConvention::Passband
        } else {
            EdgeConvention::Stopband
        },
        allow_unstable: rng.random::<bool>(),
        confidence_ratio: uniform(rng, 0.0, 30.0),
    };
    let mut t = 0.0;
    let knots = rng.random_range(0..4usize);
    let rate_schedule = (0..knots)
        .map(|_| {
            t += uniform(rng, 1.0, 300.0);
            RateKnot {
                time: t,
                breathing_bpm: uniform(rng, 6.0, 40.0),
                heart_bpm: uniform(rng, 40.0, 180.0),
            }
        })
        .collect();
    let subject = SubjectSettings {
        rest_distance: uniform(rng, 0.2, 2.0),
        breathing_amplitude: uniform(rng, 0.001, 0.01),
        breathing_bpm: uniform(rng, 6.0, 40.0),
        breathing_phase_rad: uniform(rng, -PI, PI),
        heartbeat_amplitude: uniform(rng, 1e-4, 1e-3),
        heart_bpm: uniform(rng, 40.0, 180.0),
        heartbeat_phase_rad: uniform(rng, -PI, PI),
        harmonic_ratio: maybe(rng, |r| uniform(r, 0.0, 1.0)),
        bearing_deg: maybe(rng, |r| uniform(r, -80.0, 80.0)),
        rate_schedule,
    };
    let channel = ChannelSettings {
        system_constant_db: uniform(rng, -130.0, -90.0),
        path_loss_exponent: uniform(rng, 1.0, 5.0),
        half_power_semi_angle_deg: uniform(rng, 10.0, 85.0),
        detector_area: uniform(rng, 1e-6, 1e-3),
        transmit_power: maybe(rng, |r| uniform(r, 1e-3, 10.0)),
    };
    let acquisition = AcquisitionSettings {
        sampling_rate: uniform(rng, 20.0, 1000.0),
        duration: uniform(rng, 1.0, 1000.0),
        bit_depth: maybe(rng, |r| r.random_range(1..=32u32)),
        full_scale: uniform(rng, 1e-12, 1.0),
    };
    let tones = rng.random_range(0..3usize);
    let noise = NoiseSettings {
        std: uniform(rng, 0.0, 1e-9),
        snr_db: maybe(rng, |r| uniform(r, -10.0, 60.0)),
        drift_amplitude: uniform(rng, 0.0, 1e-10),
        drift_period: uniform(rng, 1.0, 600.0),
        interference: (0..tones)
            .map(|_| Tone {
                frequency: uniform(rng, 0.1, 50.0),
                amplitude: uniform(rng, 0.0, 1e-10),
            })
            .collect(),
        seed: rng.random(),
    };
    let parameter = [
        SweepParameter::Distance,
        SweepParameter::Snr,
        SweepParameter::PositionGrid,
    ][rng.random_range(0..3usize)];
    let values = (0..rng.random_range(1..6usize))
        .map(|_| uniform(rng, 0.1, 3.0))
        .collect();
    let sweep = SweepSpec {
        parameter,
        values,
        grid_x: GridAxis {
            min: uniform(rng, -1.0, 0.0),
            max: uniform(rng, 0.0, 1.0),
            steps: rng.random_range(1..10),
        },
        grid_y: GridAxis {
            min: uniform(rng, 0.1, 0.5),
            max: uniform(rng, 0.5, 2.0),
            steps: rng.random_range(1..10),
        },
        trials: rng.random_range(1..100),
        seed_base: rng.random(),
        breathing_bpm: (uniform(rng, 8.0, 12.0), uniform(rng, 12.0, 25.0)),
        heart_bpm: (uniform(rng, 50.0, 60.0), uniform(rng, 60.0, 120.0)),
    };
    RunConfig {
        pipeline,
        subject,
        channel,
        acquisition,
        noise,
        sweep,
    }
}
