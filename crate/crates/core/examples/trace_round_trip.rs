//! Write and re-read a trace and a run configuration.
//!
//! ```text
//! cargo run --example trace_round_trip
//! ```

use vls_vitals::io::{load_config, read_trace, save_config, write_trace, GroundTruth, RunConfig, Trace};

fn main() -> vls_vitals::Result<()> {
    let dir = std::env::temp_dir().join(format!("vls-round-trip-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| vls_vitals::Error::Io {
        path: dir.clone(),
        source: e,
    })?;

    let trace = Trace::new(100.0, vec![1.25e-10, 1.3e-10, 0.1 + 0.2])?
        .with_truth(GroundTruth {
            breathing_bpm: 15.0,
            heart_bpm: 72.0,
        })?
        .with_metadata("subject", "bench test")?;
    let path = dir.join("example.trace");
    write_trace(&trace, &path)?;
    print!("{}", trace.to_text());
    assert_eq!(read_trace(&path)?, trace);
    println!("trace round-trips exactly\n");

    let mut config = RunConfig::default();
    config.noise.snr_db = Some(15.0);
    let path = dir.join("run.ini");
    save_config(&config, &path)?;
    print!("{}", config.to_ini_string());
    assert_eq!(load_config(&path)?, config);
    println!("\nconfig round-trips exactly");

    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
