//! `optimize`: per-speed optimal sensing time, bias field, slope and
//! shot-noise sensitivity across a range of rotation speeds.

use crate::config::{OutFormat, RunConfig};
use crate::output::{metadata_header, write_atomic};
use crate::CliError;
use clap::Args;
use drum_core::optimizer::{speed_sweep, Interpolation, SweepOutcome, T2Profile};
use serde::Serialize;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    /// Rotation speeds in Hz: comma list ("1000,2000") or range
    /// ("start:end:step").
    #[arg(long)]
    speeds: String,
    /// Coherence-profile CSV (columns speed_hz,t2_s). Default: built-in
    /// linear profile.
    #[arg(long)]
    t2_profile: Option<PathBuf>,
}

#[derive(Serialize)]
struct OptimizeOutput<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    outcome: SweepOutcome,
}

fn parse_speeds(text: &str) -> Result<Vec<f64>, CliError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(CliError::Validation("--speeds list is empty".into()));
    }
    let bad = |what: &str| CliError::Validation(format!("bad --speeds value: {what}"));
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("range form is start:end:step"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad(parts[0]))?;
        let end: f64 = parts[1].trim().parse().map_err(|_| bad(parts[1]))?;
        let step: f64 = parts[2].trim().parse().map_err(|_| bad(parts[2]))?;
        if step <= 0.0 || end < start {
            return Err(bad("need end >= start and step > 0"));
        }
        let n = ((end - start) / step).round() as usize + 1;
        return Ok((0..n)
            .map(|i| start + step * i as f64)
            .filter(|s| *s <= end + 1e-9)
            .collect());
    }
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad(s)))
        .collect()
}

pub fn run(config: &RunConfig, args: &OptimizeArgs) -> Result<(), CliError> {
    let speeds = parse_speeds(&args.speeds)?;
    let profile = match &args.t2_profile {
        Some(path) => {
            let file = File::open(path).map_err(|e| {
                CliError::Validation(format!("cannot open {}: {e}", path.display()))
            })?;
            T2Profile::from_csv(BufReader::new(file), Interpolation::Linear)
                .map_err(|e| CliError::Validation(e.to_string()))?
        }
        None => T2Profile::default(),
    };

    let outcome = speed_sweep(&speeds, &profile, &config.sensor);
    for (speed, why) in &outcome.failures {
        eprintln!("warning: speed {speed} Hz failed: {why}");
    }
    if outcome.points.is_empty() {
        return Err(CliError::Runtime("every speed in the sweep failed".into()));
    }

    match config.format {
        OutFormat::Json => {
            let out = OptimizeOutput { config, outcome };
            let json =
                serde_json::to_string_pretty(&out).map_err(|e| CliError::Runtime(e.to_string()))?;
            write_atomic(
                &super::out_path(config, "optimize", "json"),
                json.as_bytes(),
            )
        }
        OutFormat::Csv => {
            let mut text = metadata_header(config);
            for (speed, why) in &outcome.failures {
                text.push_str(&format!("# failed {speed}: {why}\n"));
            }
            text.push_str("speed_hz,tau_opt_s,b_z_t,slope_per_t,sensitivity_t_per_sqrt_hz\n");
            for p in &outcome.points {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    p.omega_rot / std::f64::consts::TAU,
                    p.tau_opt,
                    p.b_z,
                    p.slope_at_opt,
                    p.sensitivity_at_opt
                ));
            }
            write_atomic(&super::out_path(config, "optimize", "csv"), text.as_bytes())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speed_parsing() {
        assert_eq!(parse_speeds("1000,2000").unwrap(), vec![1000.0, 2000.0]);
        let range = parse_speeds("1000:6000:250").unwrap();
        assert_eq!(range.len(), 21);
        assert_eq!(range[0], 1000.0);
        assert_eq!(*range.last().unwrap(), 6000.0);
        assert!(parse_speeds("").is_err());
        assert!(parse_speeds("1000:500:10").is_err());
        assert!(parse_speeds("a,b").is_err());
    }
}
