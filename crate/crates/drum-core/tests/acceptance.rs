//! Acceptance suite: one test per headline requirement, each printing a
//! PASS line with the measured numbers (run with `--nocapture` to see them).

use drum_core::interferometry::{
    async_contrast, async_contrast_brute_force, delay_scan, echo_phase_analytic,
    echo_phase_numeric, FieldAxis, SequenceParams,
};
use drum_core::model::{revival_time, RotationState, SensorConfig};
use drum_core::optimizer::{optimal_tau, required_t2_for_gain};
use drum_core::readout::{mc_noise_floor, mc_sensitivity, simulate_measurement, Normalization};
use drum_core::rng::StreamSeed;
use drum_core::sensitivity::{
    drum_shot_noise_sensitivity, drum_slope, gain_ratio, ideal_ramsey_sensitivity, SensitivityForm,
};
use drum_core::stability::{
    cumulative_phase, default_m_grid, naive_adev, overlapped_adev, synthesize_noise, NoiseKind,
};
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::Instant;

/// θ_NV = 30° exactly, t_rot = 266.7 µs, C = 0.1: the headline evaluation
/// point for the sensitivity formulas.
fn headline_sensor() -> (SensorConfig, RotationState) {
    let sensor = SensorConfig {
        theta_nv: 30.0_f64.to_radians(),
        ..SensorConfig::default()
    };
    let rot = RotationState::new(TAU / 266.7e-6, FRAC_PI_2);
    (sensor, rot)
}

fn lin_fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn criterion_01_phase_oracle_equivalence() {
    let start = Instant::now();
    let sensor = SensorConfig::default();
    let mut rng = StreamSeed(0xACCE97).stream(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let f_rot: f64 = 1e3 + 5e3 * rng.random::<f64>();
        let rot = RotationState::new(TAU * f_rot, FRAC_PI_2);
        let b_x: f64 = 10e-6 * rng.random::<f64>();
        let tau: f64 = rot.period() * rng.random::<f64>().max(1e-3);
        let phi0: f64 = TAU * rng.random::<f64>();
        let seq = SequenceParams {
            tau,
            ..Default::default()
        };
        let ana = echo_phase_analytic(b_x, &seq, &sensor, &rot, phi0);
        let num = echo_phase_numeric(b_x, &seq, &sensor, &rot, phi0).unwrap();
        let rel = (ana - num).abs() / ana.abs().max(1e-12);
        worst = worst.max(rel);
    }
    assert!(worst <= 1e-9, "worst relative error {worst:.3e}");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "took {elapsed:.1} s");
    println!(
        "PASS criterion 1: phase oracle equivalence, worst rel err {worst:.2e} in {elapsed:.2} s"
    );
}

#[test]
fn criterion_02_shot_noise_sensitivity() {
    let (sensor, rot) = headline_sensor();
    let db = drum_shot_noise_sensitivity(180e-6, &rot, &sensor, SensitivityForm::FixedPenalty);
    assert!(
        (15.3e-9..=20.7e-9).contains(&db),
        "shot-noise sensitivity {db:.3e} outside [15.3, 20.7] nT/sqrt(Hz)"
    );
    println!(
        "PASS criterion 2: shot-noise sensitivity {:.2} nT/sqrt(Hz) in [15.3, 20.7]",
        db * 1e9
    );
}

#[test]
fn criterion_03_ideal_ramsey_sensitivity() {
    let sensor = SensorConfig::default();
    let db = ideal_ramsey_sensitivity(&sensor);
    let rel = (db - 122e-9).abs() / 122e-9;
    assert!(
        rel <= 0.10,
        "ideal Ramsey {db:.3e} deviates {rel:.3} from 122 nT/sqrt(Hz)"
    );
    println!(
        "PASS criterion 3: ideal Ramsey {:.1} nT/sqrt(Hz), within 10% of 122",
        db * 1e9
    );
}

#[test]
fn criterion_04_gain_threshold() {
    let sensor = SensorConfig::default();
    let t2 = required_t2_for_gain(10.0, &sensor).unwrap();
    let ratio = t2 / sensor.t2_star;
    assert!(
        (ratio - 61.7).abs() <= 0.617,
        "required T2 = {ratio:.2} T2*"
    );

    let root = (sensor.t2 / sensor.t2_star).sqrt();
    assert!(
        (root - 26.3).abs() <= 0.02 * 26.3,
        "sqrt(T2/T2*) = {root:.2}"
    );
    let g = gain_ratio(&sensor);
    assert!(
        (g - std::f64::consts::PI / 4.0 / root).abs() <= 1e-12,
        "gain ratio {g} inconsistent with sqrt(T2/T2*)"
    );
    println!("PASS criterion 4: gain-10 threshold {ratio:.1} T2*, sqrt(T2/T2*) = {root:.2}, ratio {g:.4}");
}

#[test]
fn criterion_05_revival_timing() {
    let sensor = SensorConfig::default();
    let forward = RotationState::new(TAU * 3.75e3, 0.0);
    let tau1 = revival_time(0.7e-3, &forward, &sensor, 1).unwrap();
    assert!(
        (tau1 - 177.8e-6).abs() <= 0.5e-6,
        "additive revival {tau1:.4e}"
    );
    assert!(
        (tau1 - 180e-6).abs() <= 0.02 * 180e-6,
        "revival {tau1:.4e} vs 180 us"
    );

    let reverse = RotationState::new(-TAU * 3.75e3, 0.0);
    let tau2 = revival_time(2.68e-3, &reverse, &sensor, 1).unwrap();
    assert!(
        (tau2 - 80.2e-6).abs() <= 0.2e-6,
        "subtractive revival {tau2:.4e}"
    );
    println!(
        "PASS criterion 5: revivals {:.1} us (0.7 mT additive), {:.1} us (2.68 mT subtractive)",
        tau1 * 1e6,
        tau2 * 1e6
    );
}

#[test]
fn criterion_06_monte_carlo_convergence() {
    let start = Instant::now();
    let (sensor, rot) = headline_sensor();
    let seq = SequenceParams::default();
    let model = sensor.readout;

    // Convergence to the analytic floor at 4e4 rotation periods.
    let t_total = 4e4 * rot.period();
    let mc = mc_sensitivity(&seq, &sensor, &rot, &model, t_total, 17).unwrap();
    let floor = mc_noise_floor(&seq, &sensor, &rot, &model, Normalization::Pooled);
    let n_pairs: f64 = 2e4;
    let sigma_rel =
        0.8 / n_pairs.sqrt() + 1.0 / (n_pairs * 2.0 * model.photons_per_window()).sqrt();
    assert!(
        (mc - floor).abs() <= 3.0 * sigma_rel * floor,
        "mc {mc:.4e} vs floor {floor:.4e} (3 sigma = {:.2e})",
        3.0 * sigma_rel * floor
    );
    // The floor itself sits within 15% of the reference 18 nT/sqrt(Hz).
    assert!(
        (15.3e-9..=20.7e-9).contains(&mc),
        "mc {mc:.3e} outside the headline window"
    );

    // Estimator variance scales as 1/n over three decades.
    let reps = 400usize;
    let mut points = Vec::new();
    for (decade, &n) in [100u64, 1000, 10_000, 100_000].iter().enumerate() {
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for r in 0..reps {
            let seed = (decade * reps + r) as u64;
            let (_, e) = simulate_measurement(0.0, &model, n, seed);
            sum += e;
            sum2 += e * e;
        }
        let mean = sum / reps as f64;
        let var = sum2 / reps as f64 - mean * mean;
        points.push(((n as f64).ln(), var.ln()));
    }
    let slope = lin_fit_slope(&points);
    assert!((slope + 1.0).abs() <= 0.05, "variance slope {slope:.3}");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed:.1} s");
    println!(
        "PASS criterion 6: MC {:.2} nT/sqrt(Hz) vs floor {:.2}, variance slope {slope:.3} in {elapsed:.1} s",
        mc * 1e9,
        floor * 1e9
    );
}

#[test]
fn criterion_07_allan_pipeline() {
    let start = Instant::now();
    let n = 100_000;

    let white = synthesize_noise(NoiseKind::WhiteFrequency, 1e-3, n, 10.0, 5);
    let phase = cumulative_phase(&white.samples, 10.0);
    let (curve, _) = overlapped_adev(&phase, 10.0, &default_m_grid(n));
    let dof = curve.effective_dof();
    let pts: Vec<(f64, f64)> = curve
        .averaging_times
        .iter()
        .zip(&curve.deviations)
        .zip(&dof)
        .filter(|((_, d), edf)| **d > 0.0 && **edf >= 8.0)
        .map(|((t, d), _)| (t.ln(), d.ln()))
        .collect();
    let white_slope = lin_fit_slope(&pts);
    assert!(
        (white_slope + 0.5).abs() <= 0.05,
        "white slope {white_slope:.3}"
    );

    let walk = synthesize_noise(NoiseKind::RandomWalkFrequency, 1e-4, n, 10.0, 6);
    let phase = cumulative_phase(&walk.samples, 10.0);
    let (curve, _) = overlapped_adev(&phase, 10.0, &default_m_grid(n));
    let dof = curve.effective_dof();
    let pts: Vec<(f64, f64)> = curve
        .averaging_times
        .iter()
        .zip(&curve.deviations)
        .zip(&dof)
        .filter(|((_, d), edf)| **d > 0.0 && **edf >= 8.0)
        .map(|((t, d), _)| (t.ln(), d.ln()))
        .collect();
    let walk_slope = lin_fit_slope(&pts);
    assert!(
        (walk_slope - 0.5).abs() <= 0.05,
        "random-walk slope {walk_slope:.3}"
    );

    // Linear phase ramp: exactly zero deviation (dyadic increments).
    let ramp: Vec<f64> = (0..4096).map(|i| 0.0625 * i as f64).collect();
    let (curve, _) = overlapped_adev(&ramp, 10.0, &default_m_grid(4096));
    assert!(
        curve.deviations.iter().all(|d| *d == 0.0),
        "ramp deviations not exactly zero"
    );

    // Overlapped estimator against the naive non-overlapped oracle, N <= 64:
    // identical at m = 1, same target statistically at m > 1.
    let series = synthesize_noise(NoiseKind::WhiteFrequency, 1e-3, 64, 1.0, 9);
    let phase = cumulative_phase(&series.samples, 1.0);
    let (curve, _) = overlapped_adev(&phase, 1.0, &[1]);
    let (naive1, _) = naive_adev(&phase, 1.0, 1).unwrap();
    assert!(
        ((curve.deviations[0] - naive1) / naive1).abs() <= 1e-12,
        "m=1 estimators differ"
    );
    for m in [2u64, 4, 8] {
        let (mut sum_o, mut sum_n) = (0.0, 0.0);
        for seed in 0..400 {
            let series = synthesize_noise(NoiseKind::WhiteFrequency, 1e-3, 64, 1.0, 1000 + seed);
            let phase = cumulative_phase(&series.samples, 1.0);
            let (c, _) = overlapped_adev(&phase, 1.0, &[m]);
            sum_o += c.deviations[0];
            sum_n += naive_adev(&phase, 1.0, m).unwrap().0;
        }
        let ratio = sum_o / sum_n;
        assert!(
            (ratio - 1.0).abs() <= 0.05,
            "m={m} overlapped/naive ratio {ratio:.3}"
        );
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "took {elapsed:.1} s");
    println!(
        "PASS criterion 7: Allan slopes {white_slope:.3} (white), {walk_slope:.3} (walk), ramp exactly 0, naive oracle OK in {elapsed:.1} s"
    );
}

#[test]
fn criterion_08_optimizer() {
    let start = Instant::now();
    let sensor = SensorConfig {
        t2: 250e-6,
        ..SensorConfig::default()
    };
    let rot = RotationState::new(TAU * 3.75e3, FRAC_PI_2);
    let point = optimal_tau(&rot, &sensor).unwrap();
    let frac = point.tau_opt / sensor.t2;
    assert!((0.65..=0.85).contains(&frac), "tau_opt/T2 = {frac:.3}");

    let t_rot = rot.period();
    let mut grid_best = f64::NEG_INFINITY;
    for i in 1..=100_000 {
        grid_best = grid_best.max(drum_slope(t_rot * i as f64 / 1e5, &rot, &sensor, 1.0));
    }
    let rel = (point.slope_at_opt - grid_best).abs() / grid_best;
    assert!(rel <= 1e-6, "grid oracle disagreement {rel:.2e}");
    assert!(point.slope_at_opt >= grid_best * (1.0 - 1e-12));

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "took {elapsed:.1} s");
    println!(
        "PASS criterion 8: tau_opt/T2 = {frac:.3} in [0.65, 0.85], grid agreement {rel:.1e} in {elapsed:.2} s"
    );
}

#[test]
fn criterion_09_async_calibration() {
    let start = Instant::now();
    let seq = SequenceParams::default();
    let sensor = SensorConfig::default();
    let rot = RotationState::new(TAU * 3.75e3, FRAC_PI_2);

    // Brute-force phase average agreement.
    let mut worst = 0.0f64;
    for (bx, by) in [
        (0.0, 0.0),
        (5e-8, 0.0),
        (0.0, 5e-8),
        (2e-7, 1e-7),
        (7e-7, 7e-7),
        (1.5e-6, 2e-7),
    ] {
        let fast = async_contrast(bx, by, &seq, &sensor, &rot);
        let slow = async_contrast_brute_force(bx, by, &seq, &sensor, &rot, 1024);
        worst = worst.max((fast - slow).abs());
    }
    assert!(worst <= 1e-6, "brute-force deviation {worst:.2e}");

    // Global maximum at zero transverse field over a 41x41 grid.
    let peak = async_contrast(0.0, 0.0, &seq, &sensor, &rot);
    let mut grid_max = f64::NEG_INFINITY;
    let mut argmax = (0, 0);
    for i in 0..41 {
        for j in 0..41 {
            let bx = -2e-6 + 1e-7 * i as f64;
            let by = -2e-6 + 1e-7 * j as f64;
            let c = async_contrast(bx, by, &seq, &sensor, &rot);
            if c > grid_max {
                grid_max = c;
                argmax = (i, j);
            }
        }
    }
    assert_eq!(argmax, (20, 20), "maximum not at zero field");
    assert!((grid_max - peak).abs() <= 1e-12);

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "took {elapsed:.1} s");
    println!(
        "PASS criterion 9: async contrast matches brute force to {worst:.1e}, peak at zero field in {elapsed:.2} s"
    );
}

#[test]
fn criterion_10_vector_quadrature() {
    let seq = SequenceParams::default();
    let sensor = SensorConfig::default();
    let rot = RotationState::new(TAU * 3.75e3, FRAC_PI_2);
    let period = rot.period();
    let t_dels: Vec<f64> = (0..256).map(|i| i as f64 * period / 256.0).collect();

    // Fit the phase of each response against the known rotation frequency.
    let fitted_phase = |axis: FieldAxis| {
        let scan = delay_scan(&t_dels, axis, &seq, &sensor, &rot);
        let (mut s, mut c) = (0.0, 0.0);
        for (t, r) in scan {
            s += r * (rot.omega_rot * t).sin();
            c += r * (rot.omega_rot * t).cos();
        }
        f64::atan2(c, s)
    };
    let psi_x = fitted_phase(FieldAxis::X);
    let psi_y = fitted_phase(FieldAxis::Y);
    let mut delta = (psi_x - psi_y).to_degrees().abs() % 360.0;
    if delta > 180.0 {
        delta = 360.0 - delta;
    }
    assert!(
        (delta - 90.0).abs() <= 0.1,
        "quadrature angle {delta:.4} deg"
    );
    println!("PASS criterion 10: x/y responses {delta:.2} deg out of phase");
}
