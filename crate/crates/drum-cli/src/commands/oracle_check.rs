//! `oracle-check`: runs the independent numeric routes against the closed
//! forms on demand and reports the worst error per oracle.
//!
//! Debug builds honor `DRUM_ORACLE_PERTURB=<factor>` which multiplies the
//! analytic echo phase by (1 + factor); the negative control for the test
//! suite, compiled out of release binaries.

use crate::config::RunConfig;
use crate::CliError;
use clap::Args;
use drum_core::interferometry::{
    async_contrast, async_contrast_brute_force, echo_phase_analytic, echo_phase_numeric,
    SequenceParams,
};
use drum_core::model::RotationState;
use drum_core::rng::StreamSeed;
use drum_core::stability::{
    cumulative_phase, naive_adev, overlapped_adev, synthesize_noise, NoiseKind,
};
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, TAU};

#[derive(Args, Debug)]
pub struct OracleCheckArgs {
    /// Number of random parameter tuples per oracle.
    #[arg(long, default_value_t = 200)]
    grid_size: usize,
}

struct OracleResult {
    name: &'static str,
    worst: f64,
    tolerance: f64,
}

fn perturbation() -> f64 {
    #[cfg(debug_assertions)]
    {
        if let Ok(text) = std::env::var("DRUM_ORACLE_PERTURB") {
            return text.parse().unwrap_or(0.0);
        }
    }
    0.0
}

pub fn run(config: &RunConfig, args: &OracleCheckArgs) -> Result<(), CliError> {
    if args.grid_size == 0 {
        return Err(CliError::Validation(
            "--grid-size must be at least 1".into(),
        ));
    }
    let sensor = &config.sensor;
    let perturb = 1.0 + perturbation();
    let seed = StreamSeed(config.rng_seed);
    let mut results = Vec::new();

    // Echo phase: closed form against adaptive quadrature.
    {
        let mut rng = seed.stream(0);
        let mut worst = 0.0f64;
        for _ in 0..args.grid_size {
            let f_rot: f64 = 1e3 + 5e3 * rng.random::<f64>();
            let rot = RotationState::new(TAU * f_rot, FRAC_PI_2);
            let seq = SequenceParams {
                tau: rot.period() * rng.random::<f64>().max(1e-3),
                ..config.sequence
            };
            let b_x = 10e-6 * rng.random::<f64>();
            let phi0 = TAU * rng.random::<f64>();
            let ana = echo_phase_analytic(b_x, &seq, sensor, &rot, phi0) * perturb;
            let num = echo_phase_numeric(b_x, &seq, sensor, &rot, phi0)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            worst = worst.max((ana - num).abs() / ana.abs().max(1e-12));
        }
        results.push(OracleResult {
            name: "echo-phase",
            worst,
            tolerance: 1e-9,
        });
    }

    // Asynchronous contrast: Bessel identity against the phase average.
    {
        let mut rng = seed.stream(1);
        let rot = config.rotation;
        let mut worst = 0.0f64;
        for _ in 0..args.grid_size {
            let b_x = 2e-6 * (rng.random::<f64>() - 0.5);
            let b_y = 2e-6 * (rng.random::<f64>() - 0.5);
            let fast = async_contrast(b_x, b_y, &config.sequence, sensor, &rot);
            let slow = async_contrast_brute_force(b_x, b_y, &config.sequence, sensor, &rot, 1024);
            worst = worst.max((fast - slow).abs());
        }
        results.push(OracleResult {
            name: "async-contrast",
            worst,
            tolerance: 1e-6,
        });
    }

    // Allan estimator: overlapped against the naive non-overlapped form,
    // exact at m = 1, as a seed-averaged ratio at m > 1.
    {
        let mut worst = 0.0f64;
        for s in 0..args.grid_size.min(64) as u64 {
            let series = synthesize_noise(NoiseKind::WhiteFrequency, 1e-3, 64, 1.0, s);
            let phase = cumulative_phase(&series.samples, 1.0);
            let (curve, _) = overlapped_adev(&phase, 1.0, &[1]);
            let (naive, _) = naive_adev(&phase, 1.0, 1).expect("m=1 fits in 64 samples");
            worst = worst.max((curve.deviations[0] - naive).abs() / naive);
        }
        results.push(OracleResult {
            name: "allan-m1-exact",
            worst,
            tolerance: 1e-12,
        });

        let mut worst_ratio = 0.0f64;
        for m in [2u64, 4] {
            let (mut sum_o, mut sum_n) = (0.0, 0.0);
            for s in 0..400u64 {
                let series = synthesize_noise(NoiseKind::WhiteFrequency, 1e-3, 64, 1.0, 7000 + s);
                let phase = cumulative_phase(&series.samples, 1.0);
                let (curve, _) = overlapped_adev(&phase, 1.0, &[m]);
                sum_o += curve.deviations[0];
                sum_n += naive_adev(&phase, 1.0, m).expect("fits").0;
            }
            worst_ratio = worst_ratio.max((sum_o / sum_n - 1.0).abs());
        }
        results.push(OracleResult {
            name: "allan-overlap-mean",
            worst: worst_ratio,
            tolerance: 0.05,
        });
    }

    let mut all_ok = true;
    println!(
        "{:<20} {:>12} {:>12} {:>6}",
        "oracle", "max_error", "tolerance", "status"
    );
    for r in &results {
        let ok = r.worst <= r.tolerance;
        all_ok &= ok;
        println!(
            "{:<20} {:>12.3e} {:>12.1e} {:>6}",
            r.name,
            r.worst,
            r.tolerance,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Runtime(
            "one or more oracles out of tolerance".into(),
        ))
    }
}
