//! Estimate breathing and heart rate from a simulated trace, or from a trace file.
//!
//! ```text
//! cargo run --example estimate_vitals -- [input.trace]
//! ```

use vls_vitals::cli::format_report;
use vls_vitals::dsp::{estimate_vitals, PipelineConfig};
use vls_vitals::io::read_trace;
use vls_vitals::optics::LambertianChannel;
use vls_vitals::physio::{synthesize_trace, AdcModel, NoiseModel, SubjectMotion};

fn main() -> vls_vitals::Result<()> {
    let trace = match std::env::args().nth(1) {
        Some(path) => read_trace(path)?,
        None => synthesize_trace(
            &SubjectMotion::default(),
            &LambertianChannel::default(),
            &AdcModel::default(),
            &NoiseModel::noiseless(),
            60.0,
        )?,
    };
    let pipeline = PipelineConfig::default();
    let report = estimate_vitals(&trace, &pipeline)?;
    print!("{}", format_report(&report));
    Ok(())
}
