//! Simulate a minute of received power for a seated subject and save it.
//!
//! ```text
//! cargo run --example synthesize_trace -- [output.trace] [snr_db]
//! ```

use vls_vitals::io::write_trace;
use vls_vitals::optics::LambertianChannel;
use vls_vitals::physio::{synthesize_trace, AdcModel, AdditiveNoise, NoiseModel, SubjectMotion};

fn main() -> vls_vitals::Result<()> {
    let mut args = std::env::args().skip(1);
    let output = args.next().unwrap_or_else(|| "subject.trace".into());
    let snr_db: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20.0);

    let motion = SubjectMotion::default();
    for warning in motion.validate()? {
        eprintln!("warning: {warning}");
    }
    let noise = NoiseModel {
        additive: AdditiveNoise::SnrDb(snr_db),
        seed: 1,
        ..NoiseModel::default()
    };
    let trace = synthesize_trace(
        &motion,
        &LambertianChannel::default(),
        &AdcModel::default(),
        &noise,
        60.0,
    )?;

    let (lo, hi) = trace
        .samples()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
    println!(
        "{} samples at {} Hz, power {lo:.4e} .. {hi:.4e} W",
        trace.len(),
        trace.sampling_rate()
    );
    if let Some(truth) = trace.truth() {
        println!(
            "truth: breathing {} BPM, heart {} BPM",
            truth.breathing_bpm, truth.heart_bpm
        );
    }
    write_trace(&trace, &output)?;
    println!("wrote {output}");
    Ok(())
}
