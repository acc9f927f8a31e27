//! Monte-Carlo sweep of subject distance under a fixed receiver noise floor.
//!
//! ```text
//! cargo run --release --example distance_sweep -- [noise_std_w] [trials]
//! ```

use vls_vitals::cli::{run_sweep, sweep_csv, SweepSpec};
use vls_vitals::io::RunConfig;

fn main() -> vls_vitals::Result<()> {
    let mut args = std::env::args().skip(1);
    let std: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1e-13);
    let trials: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);

    let mut config = RunConfig::default();
    config.noise.std = std;
    let spec = SweepSpec {
        trials,
        ..SweepSpec::default()
    };
    let rows = run_sweep(&config, &spec)?;
    print!("{}", sweep_csv(&spec, &rows));
    Ok(())
}
