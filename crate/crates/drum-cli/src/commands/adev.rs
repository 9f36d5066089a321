//! `adev`: Allan-deviation stability analysis of a polled contrast series,
//! either read from CSV or synthesized with a known noise character.

use crate::config::{OutFormat, RunConfig};
use crate::output::{metadata_header, write_atomic};
use crate::CliError;
use clap::Args;
use drum_core::sensitivity::drum_slope;
use drum_core::stability::{
    classify_regimes, contrast_to_frequency, cumulative_phase, default_m_grid, overlapped_adev,
    synthesize_noise, AdevCurve, ContrastSeries, NoiseKind, Regime,
};
use serde::Serialize;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct AdevArgs {
    /// Contrast-series CSV (columns time_s,contrast).
    #[arg(long, conflicts_with = "synthesize")]
    input: Option<PathBuf>,
    /// Synthesize a series instead of reading one.
    #[arg(long, value_enum)]
    synthesize: Option<SynthKind>,
    /// Samples for a synthesized series.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Noise magnitude for a synthesized series (contrast units per sample).
    #[arg(long, default_value_t = 1e-3)]
    magnitude: f64,
    /// Polling interval for a synthesized series, s.
    #[arg(long, default_value_t = 10.0)]
    poll_interval: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SynthKind {
    WhiteFrequency,
    RandomWalkFrequency,
    Drift,
}

#[derive(Serialize)]
struct AdevOutput<'a> {
    config: &'a RunConfig,
    slope_per_t: f64,
    curve: AdevCurve,
    deviations_t: Vec<f64>,
    regimes: Vec<Regime>,
    skipped_m: Vec<u64>,
    out_of_linear_window: usize,
}

pub fn run(config: &RunConfig, args: &AdevArgs) -> Result<(), CliError> {
    let series = match (&args.input, args.synthesize) {
        (Some(path), None) => {
            let file = File::open(path).map_err(|e| {
                CliError::Validation(format!("cannot open {}: {e}", path.display()))
            })?;
            ContrastSeries::from_csv(BufReader::new(file))
                .map_err(|e| CliError::Validation(e.to_string()))?
        }
        (None, Some(kind)) => {
            if args.samples < 16 {
                return Err(CliError::Validation("--samples must be at least 16".into()));
            }
            if args.poll_interval <= 0.0 {
                return Err(CliError::Validation("--poll-interval must be > 0".into()));
            }
            let kind = match kind {
                SynthKind::WhiteFrequency => NoiseKind::WhiteFrequency,
                SynthKind::RandomWalkFrequency => NoiseKind::RandomWalkFrequency,
                SynthKind::Drift => NoiseKind::Drift,
            };
            synthesize_noise(
                kind,
                args.magnitude,
                args.samples,
                args.poll_interval,
                config.rng_seed,
            )
        }
        _ => {
            return Err(CliError::Validation(
                "give exactly one of --input or --synthesize".into(),
            ))
        }
    };
    series
        .validate()
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let slope = drum_slope(config.sequence.tau, &config.rotation, &config.sensor, 1.0);
    let conversion = contrast_to_frequency(&series, slope, &config.sensor)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    if conversion.out_of_window > 0 {
        eprintln!(
            "warning: {} of {} samples fall outside the mid-fringe linear window",
            conversion.out_of_window,
            series.samples.len()
        );
    }
    let phase = cumulative_phase(&conversion.frequencies, series.poll_interval);
    let (curve, skipped) =
        overlapped_adev(&phase, series.poll_interval, &default_m_grid(phase.len()));
    if curve.averaging_times.is_empty() {
        return Err(CliError::Runtime(
            "series too short for any averaging factor".into(),
        ));
    }
    let regimes = classify_regimes(&curve);

    // Regime summary on stdout.
    for r in &regimes {
        println!(
            "regime: tau {:.3e}..{:.3e} s  slope {:+.3}  label {}",
            r.tau_start,
            r.tau_end,
            r.slope,
            serde_json::to_string(&r.label).unwrap().trim_matches('"')
        );
    }

    match config.format {
        OutFormat::Json => {
            let out = AdevOutput {
                config,
                slope_per_t: slope,
                deviations_t: curve.deviations_tesla(config.sensor.gamma_e),
                curve,
                regimes,
                skipped_m: skipped,
                out_of_linear_window: conversion.out_of_window,
            };
            let json =
                serde_json::to_string_pretty(&out).map_err(|e| CliError::Runtime(e.to_string()))?;
            write_atomic(&super::out_path(config, "adev", "json"), json.as_bytes())
        }
        OutFormat::Csv => {
            let mut text = metadata_header(config);
            for r in &regimes {
                text.push_str(&format!(
                    "# regime tau {:.6e}..{:.6e} slope {:+.4} label {}\n",
                    r.tau_start,
                    r.tau_end,
                    r.slope,
                    serde_json::to_string(&r.label).unwrap().trim_matches('"')
                ));
            }
            let mut body = Vec::new();
            curve
                .write_csv(config.sensor.gamma_e, &mut body)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            text.push_str(&String::from_utf8(body).expect("csv is utf8"));
            write_atomic(&super::out_path(config, "adev", "csv"), text.as_bytes())
        }
    }
}
