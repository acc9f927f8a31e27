use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vls_vitals::cli::{self, EstimateOptions, SweepParameter};
use vls_vitals::dsp::VitalKind;
use vls_vitals::io::{load_config, parse_schedule, FilterChoice, RunConfig};
use vls_vitals::{Error, Result};

/// Visible-light vital-sign simulator and estimator.
#[derive(Parser)]
#[command(name = "vls", version)]
struct Cli {
    /// INI run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Noise seed for `simulate`, seed base for `sweep`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write CSV output here instead of stdout.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a received-power trace with embedded ground truth.
    Simulate {
        /// Trace file to write.
        #[arg(short, long)]
        output: PathBuf,
        /// Seconds.
        #[arg(long)]
        duration: Option<f64>,
        /// Piecewise-linear rates as `time:breathing:heart, ...`.
        #[arg(long)]
        schedule: Option<String>,
        /// Additive noise as power SNR, dB.
        #[arg(long)]
        snr: Option<f64>,
    },
    /// Estimate breathing and heart rate from a trace file.
    Estimate {
        trace: PathBuf,
        /// FFT window length, samples.
        #[arg(long)]
        window: Option<usize>,
        /// Seconds skipped at the start.
        #[arg(long, default_value_t = 0.0)]
        warmup: f64,
    },
    /// Monte-Carlo sweep over distance, window size, SNR or position.
    Sweep {
        #[arg(long)]
        parameter: Option<String>,
        /// Comma-separated swept values.
        #[arg(long)]
        values: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Magnitude response and stability of a band-pass filter.
    Response {
        /// Which band's filter: breathing or heart.
        #[arg(long, default_value = "breathing")]
        filter: String,
        /// designed, paper-heart, paper-breathing or identity; overrides the config.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value_t = 512)]
        points: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Simulate {
            output,
            duration,
            schedule,
            snr,
        } => {
            if let Some(d) = duration {
                config.acquisition.duration = d;
            }
            if let Some(s) = schedule {
                config.subject.rate_schedule = parse_schedule(&s).map_err(Error::Validation)?;
            }
            if let Some(db) = snr {
                config.noise.snr_db = Some(db);
            }
            if let Some(seed) = cli.seed {
                config.noise.seed = seed;
            }
            let sim = cli::cmd_simulate(&config, &output)?;
            for w in &sim.warnings {
                eprintln!("warning: {w}");
            }
            println!("wrote {}", output.display());
            println!("{}", sim.summary());
            if let Some(path) = &cli.csv {
                let mut csv = String::from("time_s,power_w\n");
                let fs = sim.trace.sampling_rate();
                for (i, p) in sim.trace.samples().iter().enumerate() {
                    csv.push_str(&format!("{},{p:e}\n", i as f64 / fs));
                }
                write_file(path, &csv)?;
            }
        }
        Command::Estimate { trace, window, warmup } => {
            let options = EstimateOptions {
                window_size: window,
                warmup,
            };
            let report = cli::cmd_estimate(&trace, &config, &options)?;
            print!("{}", cli::format_report(&report));
            if let Some(path) = &cli.csv {
                write_file(path, &cli::report_csv(&report))?;
            }
        }
        Command::Sweep {
            parameter,
            values,
            trials,
        } => {
            let spec = &mut config.sweep;
            if let Some(p) = parameter {
                spec.parameter = p.parse::<SweepParameter>()?;
            }
            if let Some(v) = values {
                spec.values = v
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Validation(format!("sweep value `{}` is not a number", s.trim())))
                    })
                    .collect::<Result<_>>()?;
            }
            if let Some(t) = trials {
                spec.trials = t;
            }
            if let Some(seed) = cli.seed {
                spec.seed_base = seed;
            }
            let rows = cli::run_sweep(&config, &config.sweep)?;
            emit(cli.csv.as_deref(), &cli::sweep_csv(&config.sweep, &rows))?;
        }
        Command::Response { filter, preset, points } => {
            let kind = match filter.as_str() {
                "breathing" => VitalKind::Breathing,
                "heart" => VitalKind::Heart,
                other => {
                    return Err(Error::Validation(format!(
                        "unknown filter `{other}` (breathing or heart)"
                    )))
                }
            };
            if let Some(p) = preset {
                let choice = p.parse::<FilterChoice>()?;
                match kind {
                    VitalKind::Breathing => config.pipeline.breathing_filter = choice,
                    VitalKind::Heart => config.pipeline.heart_filter = choice,
                }
            }
            let response = cli::cmd_response(&config, kind, points)?;
            eprintln!("stability: {}", response.verdict_line());
            emit(cli.csv.as_deref(), &response.csv())?;
        }
    }
    Ok(())
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
