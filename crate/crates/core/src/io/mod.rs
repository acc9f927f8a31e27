//! Trace files and run configuration.

mod config;
mod trace;

pub use config::{
    format_schedule, load_config, parse_schedule, save_config, AcquisitionSettings, ChannelSettings, FilterChoice,
    NoiseSettings, PipelineSettings, RunConfig, SubjectSettings, CONFIG_FORMAT_VERSION,
};
pub use trace::{read_trace, write_trace, GroundTruth, Trace, TRACE_FORMAT_VERSION};
