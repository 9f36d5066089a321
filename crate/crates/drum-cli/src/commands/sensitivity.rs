//! `sensitivity`: the analytic figures of merit at the configured operating
//! point, optionally backed by a Monte Carlo operational estimate.

use crate::config::RunConfig;
use crate::output::write_atomic;
use crate::CliError;
use clap::Args;
use drum_core::readout::{mc_sensitivity_with, McOptions, Normalization};
use drum_core::sensitivity::SensitivityReport;
use serde::Serialize;

#[derive(Args, Debug)]
pub struct SensitivityArgs {
    /// Simulated measurement time for the Monte Carlo operational estimate;
    /// 0 skips the simulation and omits the field from the report.
    #[arg(long, default_value_t = 0.0)]
    mc_seconds: f64,
    /// Normalization protocol for the Monte Carlo estimate.
    #[arg(long, value_enum, default_value_t = McNorm::PerWindow)]
    mc_normalization: McNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum McNorm {
    Pooled,
    PerWindow,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    config: &'a RunConfig,
    report: SensitivityReport,
}

pub fn run(config: &RunConfig, args: &SensitivityArgs) -> Result<(), CliError> {
    if args.mc_seconds < 0.0 {
        return Err(CliError::Validation("--mc-seconds must be >= 0".into()));
    }
    let mut report = SensitivityReport::compute(
        config.sequence.tau,
        config.sequence.t_dead,
        &config.rotation,
        &config.sensor,
        1.0,
    );
    if args.mc_seconds > 0.0 {
        let normalization = match args.mc_normalization {
            McNorm::Pooled => Normalization::Pooled,
            McNorm::PerWindow => Normalization::PerWindow,
        };
        let opts = McOptions {
            normalization,
            ..Default::default()
        };
        let mc = mc_sensitivity_with(
            &config.sequence,
            &config.sensor,
            &config.rotation,
            &config.sensor.readout,
            args.mc_seconds,
            config.rng_seed,
            opts,
        )
        .map_err(|e| CliError::Runtime(e.to_string()))?;
        report.operational = Some(mc);
    }

    let json = serde_json::to_string_pretty(&ReportFile { config, report })
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    write_atomic(
        &super::out_path(config, "sensitivity", "json"),
        json.as_bytes(),
    )
}
