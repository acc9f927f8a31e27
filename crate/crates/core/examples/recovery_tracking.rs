//! Track rates falling back to rest over fifteen minutes after exercise.
//!
//! ```text
//! cargo run --release --example recovery_tracking
//! ```

use vls_vitals::dsp::{estimate_vitals, BandSpec, ChebyshevDesign, PipelineConfig, VitalKind};
use vls_vitals::optics::LambertianChannel;
use vls_vitals::physio::{synthesize_trace, AdcModel, AdditiveNoise, NoiseModel, RateSchedule, SubjectMotion};

fn main() -> vls_vitals::Result<()> {
    let motion = SubjectMotion {
        rate_schedule: Some(RateSchedule::ramp(900.0, (30.0, 120.0), (12.0, 70.0))?),
        ..SubjectMotion::default()
    };
    let noise = NoiseModel {
        additive: AdditiveNoise::SnrDb(20.0),
        seed: 5,
        ..NoiseModel::default()
    };
    let trace = synthesize_trace(
        &motion,
        &LambertianChannel::default(),
        &AdcModel::default(),
        &noise,
        900.0,
    )?;

    // the heart band starts above the elevated breathing rate so breathing cannot leak in
    let pipeline = PipelineConfig::designed(
        100.0,
        2048,
        BandSpec::new(6.0, 60.0, VitalKind::Breathing)?,
        BandSpec::new(40.0, 240.0, VitalKind::Heart)?,
        &ChebyshevDesign::default(),
    )?
    .with_overlap(0.5)?;
    let report = estimate_vitals(&trace, &pipeline)?;

    println!("center_s  breathing  (true)   heart  (true)");
    let heart: Vec<_> = report.windows_of(VitalKind::Heart).collect();
    for (b, h) in report.windows_of(VitalKind::Breathing).zip(heart) {
        let center = b.start_time + report.window_seconds() / 2.0;
        let (tb, th) = motion.rates_bpm_at(center);
        println!(
            "{center:>8.1}  {:>9.2}  ({tb:>5.1})  {:>6.2}  ({th:>5.1})",
            b.bpm, h.bpm
        );
    }
    Ok(())
}
