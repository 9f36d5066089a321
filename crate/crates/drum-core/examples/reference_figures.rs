//! Print the reference figures of merit for the demonstration sensor:
//!
//!   cargo run --release --example reference_figures

use drum_core::model::{revival_time, RotationState, SensorConfig};
use drum_core::optimizer::{optimal_tau, required_t2_for_gain};
use drum_core::readout::{mc_noise_floor, mc_sensitivity_with, McOptions, Normalization};
use drum_core::sensitivity::{
    drum_shot_noise_sensitivity, gain_ratio, ideal_ramsey_sensitivity, SensitivityForm,
};
use drum_core::SequenceParams;
use std::f64::consts::{FRAC_PI_2, TAU};

fn main() {
    let sensor = SensorConfig::default();
    let rot = RotationState::new(TAU * 3.75e3, FRAC_PI_2);
    let seq = SequenceParams::default();

    let nt = 1e9; // display helper only; everything internal stays SI
    println!("demonstration sensor: theta_NV = 30.2 deg, T2 = 250 us, T2* = 360 ns, C = 0.1");
    println!("rotation 3.75 kHz, tau = 180 us\n");

    let revival = revival_time(0.7e-3, &rot, &sensor, 1).unwrap();
    println!(
        "first 13C revival at B_z = 0.7 mT:      {:8.1} us",
        revival * 1e6
    );

    let shot = drum_shot_noise_sensitivity(seq.tau, &rot, &sensor, SensitivityForm::FixedPenalty);
    println!(
        "shot-noise-limited sensitivity:         {:8.1} nT/sqrt(Hz)",
        shot * nt
    );

    let floor = mc_noise_floor(
        &seq,
        &sensor,
        &rot,
        &sensor.readout,
        Normalization::PerWindow,
    );
    let opts = McOptions {
        normalization: Normalization::PerWindow,
        ..Default::default()
    };
    let t_total = 2e5 * rot.period();
    let mc = mc_sensitivity_with(&seq, &sensor, &rot, &sensor.readout, t_total, 1, opts).unwrap();
    println!(
        "operational (self-normalized windows):  {:8.1} nT/sqrt(Hz)  (floor {:.1})",
        mc * nt,
        floor * nt
    );

    let ramsey = ideal_ramsey_sensitivity(&sensor);
    println!(
        "idealized Ramsey for the same sensor:   {:8.1} nT/sqrt(Hz)",
        ramsey * nt
    );

    let point = optimal_tau(&rot, &sensor).unwrap();
    println!(
        "optimal sensing time:                   {:8.1} us  ({:.2} T2, B_z = {:.3} mT)",
        point.tau_opt * 1e6,
        point.tau_opt / sensor.t2,
        point.b_z * 1e3
    );

    let t2_needed = required_t2_for_gain(10.0, &sensor).unwrap();
    println!(
        "T2 for a 10x gain over ideal Ramsey:    {:8.1} T2*  (gain ratio now {:.4})",
        t2_needed / sensor.t2_star,
        gain_ratio(&sensor)
    );
}
