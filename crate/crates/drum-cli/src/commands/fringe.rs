//! `fringe`: noiseless and Monte Carlo fringe scans for the up-converted
//! echo measurement and for Ramsey over the same field span.

use crate::config::{OutFormat, RunConfig};
use crate::output::{metadata_header, write_atomic};
use crate::CliError;
use clap::Args;
use drum_core::interferometry::{fringe_period, ramsey_contrast, synthesize_fringes};
use drum_core::readout::simulate_measurement;
use drum_core::rng::StreamSeed;
use serde::Serialize;

#[derive(Args, Debug)]
pub struct FringeArgs {
    /// Number of field points.
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Center of the swept transverse field, T.
    #[arg(long, default_value_t = 0.0)]
    center: f64,
    /// Field span, T. Default: four echo fringe periods.
    #[arg(long)]
    span: Option<f64>,
    /// Sequence pairs simulated per Monte Carlo point.
    #[arg(long, default_value_t = 20_000)]
    mc_pairs: u64,
    /// Ramsey sensing time, s. Default: T2*.
    #[arg(long)]
    ramsey_tau: Option<f64>,
}

#[derive(Serialize)]
struct ScanColumns {
    field_t: Vec<f64>,
    contrast: Vec<f64>,
}

#[derive(Serialize)]
struct FringeOutput<'a> {
    config: &'a RunConfig,
    fringe_period_t: f64,
    drum: ScanColumns,
    drum_mc: ScanColumns,
    ramsey: ScanColumns,
    ramsey_mc: ScanColumns,
}

pub fn run(config: &RunConfig, args: &FringeArgs) -> Result<(), CliError> {
    if args.points == 0 {
        return Err(CliError::Validation("--points must be at least 1".into()));
    }
    let sensor = &config.sensor;
    let rot = &config.rotation;
    let seq = &config.sequence;
    let phi0 = rot.phi0;

    let period = fringe_period(seq, sensor, rot, phi0);
    let span = match args.span {
        Some(s) if s < 0.0 => return Err(CliError::Validation("--span must be >= 0".into())),
        Some(s) => s,
        None if period.is_finite() => 4.0 * period,
        None => {
            return Err(CliError::Validation(
                "field response vanishes at this phi0; give --span explicitly".into(),
            ))
        }
    };

    let b_range: Vec<f64> = if args.points == 1 {
        vec![args.center]
    } else {
        (0..args.points)
            .map(|i| args.center - span / 2.0 + span * i as f64 / (args.points - 1) as f64)
            .collect()
    };

    // Noiseless echo scan.
    let drum = synthesize_fringes(&b_range, seq, sensor, rot, phi0);

    // Monte Carlo echo scan: photon sampling at the true contrast per point,
    // one RNG stream per point.
    let seed = StreamSeed(config.rng_seed);
    let drum_mc: Vec<f64> = (0..b_range.len())
        .map(|i| {
            let truth = drum.contrast_values[i].clamp(-1.0, 1.0);
            let mut stream = seed.stream(i as u64);
            let sub_seed: u64 = rand::Rng::random(&mut stream);
            simulate_measurement(truth, &sensor.readout, args.mc_pairs, sub_seed).1
        })
        .collect();

    // Ramsey over the same span: detuning equivalent to an axial field.
    let ramsey_tau = args.ramsey_tau.unwrap_or(sensor.t2_star);
    if ramsey_tau <= 0.0 {
        return Err(CliError::Validation("--ramsey-tau must be > 0".into()));
    }
    let ramsey: Vec<f64> = b_range
        .iter()
        .map(|&b| ramsey_contrast(sensor.gamma_e * b, ramsey_tau, sensor))
        .collect();
    let ramsey_mc: Vec<f64> = (0..b_range.len())
        .map(|i| {
            let truth = ramsey[i].clamp(-1.0, 1.0);
            let mut stream = seed.stream((args.points + i) as u64);
            let sub_seed: u64 = rand::Rng::random(&mut stream);
            simulate_measurement(truth, &sensor.readout, args.mc_pairs, sub_seed).1
        })
        .collect();

    match config.format {
        OutFormat::Json => {
            let out = FringeOutput {
                config,
                fringe_period_t: period,
                drum: ScanColumns {
                    field_t: b_range.clone(),
                    contrast: drum.contrast_values.clone(),
                },
                drum_mc: ScanColumns {
                    field_t: b_range.clone(),
                    contrast: drum_mc,
                },
                ramsey: ScanColumns {
                    field_t: b_range.clone(),
                    contrast: ramsey,
                },
                ramsey_mc: ScanColumns {
                    field_t: b_range,
                    contrast: ramsey_mc,
                },
            };
            let json =
                serde_json::to_string_pretty(&out).map_err(|e| CliError::Runtime(e.to_string()))?;
            write_atomic(&super::out_path(config, "fringe", "json"), json.as_bytes())?;
        }
        OutFormat::Csv => {
            let header = metadata_header(config);
            let scans: [(&str, &[f64]); 4] = [
                ("fringe_drum", &drum.contrast_values),
                ("fringe_drum_mc", &drum_mc),
                ("fringe_ramsey", &ramsey),
                ("fringe_ramsey_mc", &ramsey_mc),
            ];
            for (suffix, contrast) in scans {
                let mut text = header.clone();
                text.push_str(&format!("# fringe_period_t = {period}\n"));
                text.push_str("field_T,contrast\n");
                for (b, s) in b_range.iter().zip(contrast) {
                    text.push_str(&format!("{b},{s}\n"));
                }
                write_atomic(&super::out_path(config, suffix, "csv"), text.as_bytes())?;
            }
        }
    }

    Ok(())
}
