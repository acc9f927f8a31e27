//! Joint accuracy over randomized subjects as the noise level rises.
//!
//! ```text
//! cargo run --release --example monte_carlo_accuracy -- [trials]
//! ```

use vls_vitals::cli::{run_trial, SweepParameter, SweepPoint, SweepSpec};
use vls_vitals::dsp::bpm_resolution;
use vls_vitals::io::RunConfig;
use vls_vitals::metrics::ensemble_accuracy;

fn main() -> vls_vitals::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let config = RunConfig::default();
    let pipeline = config.pipeline_config()?;
    let tolerance = bpm_resolution(&pipeline);
    let spec = SweepSpec {
        parameter: SweepParameter::Snr,
        trials,
        ..SweepSpec::default()
    };

    println!("snr_db  accuracy (both rates within {tolerance} BPM)");
    for snr in [30.0, 20.0, 10.0, 0.0, -5.0, -10.0] {
        let point = SweepPoint::Value(SweepParameter::Snr, snr);
        let reports = (0..trials)
            .map(|t| run_trial(&config, &pipeline, &spec, point, t).map(|o| o.expect("on axis").report))
            .collect::<vls_vitals::Result<Vec<_>>>()?;
        println!("{snr:>6}  {:.2}", ensemble_accuracy(&reports, tolerance)?);
    }
    Ok(())
}
