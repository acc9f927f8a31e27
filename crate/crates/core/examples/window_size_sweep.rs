//! How the FFT window length trades estimate spread against time resolution.
//!
//! ```text
//! cargo run --release --example window_size_sweep -- [snr_db]
//! ```

use vls_vitals::cli::{run_sweep, SweepParameter, SweepSpec};
use vls_vitals::dsp::VitalKind;
use vls_vitals::io::RunConfig;

fn main() -> vls_vitals::Result<()> {
    let snr_db: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let mut config = RunConfig::default();
    config.noise.snr_db = Some(snr_db);
    let spec = SweepSpec {
        parameter: SweepParameter::WindowSize,
        values: vec![256.0, 512.0, 1024.0, 2048.0, 4096.0],
        trials: 20,
        ..SweepSpec::default()
    };
    println!("window  bin_bpm  breathing_var  heart_var  breathing_err%  heart_err%");
    for row in run_sweep(&config, &spec)? {
        let window = match row.point {
            vls_vitals::cli::SweepPoint::Value(_, n) => n,
            _ => unreachable!("window sweeps have scalar points"),
        };
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
        println!(
            "{:>6}  {:>7.3}  {:>13}  {:>9}  {:>14}  {:>10}",
            window,
            config.acquisition.sampling_rate / window * 60.0,
            fmt(row.variance(VitalKind::Breathing)),
            fmt(row.variance(VitalKind::Heart)),
            fmt(row.error_pct(VitalKind::Breathing)),
            fmt(row.error_pct(VitalKind::Heart)),
        );
    }
    Ok(())
}
