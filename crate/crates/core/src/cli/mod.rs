//! Command implementations behind the `vls` binary: simulate, estimate, sweep and
//! filter response. Each returns data; printing and file output stay in the binary.

mod commands;
mod sweep;

pub use commands::{
    cmd_estimate, cmd_response, cmd_simulate, estimate, format_report, report_csv, simulate, EstimateOptions, Response,
    Simulation,
};
pub use sweep::{
    run_sweep, run_trial, sweep_csv, GridAxis, SweepParameter, SweepPoint, SweepRow, SweepSpec, TrialOutcome,
};
