//! Operating-parameter optimization: the sensing time that maximizes the
//! transduction slope at each rotation speed, the bias field consistent with
//! the first echo revival, and sensitivity sweeps across rotation speed.

use crate::exec::map_indexed;
use crate::model::{bias_field_for_tau, ModelError, RotationState, SensorConfig};
use crate::sensitivity::{drum_shot_noise_sensitivity, drum_slope, SensitivityForm};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::BufRead;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OptimizerError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("gain target {0} implies t2 <= t2_star")]
    UnreachableGain(f64),
    #[error("speed {0} Hz is outside the coherence profile")]
    ProfileOutOfRange(f64),
    #[error("coherence profile is invalid: {0}")]
    InvalidProfile(String),
}

/// How a [`T2Profile`] interpolates between sample points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    #[default]
    Linear,
    /// Nearest sample point.
    Constant,
}

/// Measured echo coherence time versus rotation speed, supplied data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T2Profile {
    /// Rotation speeds, Hz, strictly increasing.
    pub speeds_hz: Vec<f64>,
    /// T₂ at each speed, s.
    pub t2_s: Vec<f64>,
    pub interpolation: Interpolation,
}

impl Default for T2Profile {
    /// Linear fit anchored to the measured trend: T₂ falls from 450 µs at
    /// 1 kHz to 250 µs at 6 kHz.
    fn default() -> Self {
        Self {
            speeds_hz: vec![1000.0, 6000.0],
            t2_s: vec![450e-6, 250e-6],
            interpolation: Interpolation::Linear,
        }
    }
}

impl T2Profile {
    pub fn new(
        speeds_hz: Vec<f64>,
        t2_s: Vec<f64>,
        interpolation: Interpolation,
    ) -> Result<Self, OptimizerError> {
        let profile = Self {
            speeds_hz,
            t2_s,
            interpolation,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        if self.speeds_hz.is_empty() || self.speeds_hz.len() != self.t2_s.len() {
            return Err(OptimizerError::InvalidProfile(
                "profile needs equal, non-empty speed and t2 lists".into(),
            ));
        }
        if !self.speeds_hz.windows(2).all(|w| w[1] > w[0]) {
            return Err(OptimizerError::InvalidProfile(
                "speeds must be strictly increasing".into(),
            ));
        }
        if !self.t2_s.iter().all(|t| *t > 0.0) {
            return Err(OptimizerError::InvalidProfile(
                "t2 values must be positive".into(),
            ));
        }
        Ok(())
    }

    /// T₂ at the given rotation speed. The profile must cover the speed.
    pub fn t2_at(&self, speed_hz: f64) -> Result<f64, OptimizerError> {
        let (first, last) = (self.speeds_hz[0], *self.speeds_hz.last().unwrap());
        if speed_hz < first || speed_hz > last {
            return Err(OptimizerError::ProfileOutOfRange(speed_hz));
        }
        match self.interpolation {
            Interpolation::Linear => {
                let k = self
                    .speeds_hz
                    .partition_point(|s| *s <= speed_hz)
                    .min(self.speeds_hz.len() - 1);
                if k == 0 {
                    return Ok(self.t2_s[0]);
                }
                let (s0, s1) = (self.speeds_hz[k - 1], self.speeds_hz[k]);
                let (t0, t1) = (self.t2_s[k - 1], self.t2_s[k]);
                Ok(t0 + (t1 - t0) * (speed_hz - s0) / (s1 - s0))
            }
            Interpolation::Constant => {
                let nearest = self
                    .speeds_hz
                    .iter()
                    .enumerate()
                    .min_by(|a, b| {
                        (a.1 - speed_hz)
                            .abs()
                            .partial_cmp(&(b.1 - speed_hz).abs())
                            .unwrap()
                    })
                    .map(|(i, _)| i)
                    .unwrap();
                Ok(self.t2_s[nearest])
            }
        }
    }

    /// Parse a `speed_hz,t2_s` CSV (header optional).
    pub fn from_csv<R: BufRead>(
        reader: R,
        interpolation: Interpolation,
    ) -> Result<Self, OptimizerError> {
        let mut speeds = Vec::new();
        let mut t2s = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let row = idx + 1;
            let line =
                line.map_err(|e| OptimizerError::InvalidProfile(format!("row {row}: {e}")))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with("speed_hz") {
                continue;
            }
            let mut parts = trimmed.split(',');
            let (s, t) = match (parts.next(), parts.next()) {
                (Some(s), Some(t)) => (s, t),
                _ => {
                    return Err(OptimizerError::InvalidProfile(format!(
                        "row {row}: expected speed_hz,t2_s"
                    )))
                }
            };
            let s: f64 = s.trim().parse().map_err(|e| {
                OptimizerError::InvalidProfile(format!("row {row}: bad speed: {e}"))
            })?;
            let t: f64 = t
                .trim()
                .parse()
                .map_err(|e| OptimizerError::InvalidProfile(format!("row {row}: bad t2: {e}")))?;
            speeds.push(s);
            t2s.push(t);
        }
        Self::new(speeds, t2s, interpolation)
    }
}

/// Optimal operating parameters at one rotation speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Rotation angular frequency, rad/s.
    pub omega_rot: f64,
    /// Sensing time maximizing the transduction slope, s.
    pub tau_opt: f64,
    /// Bias field placing the first revival at `tau_opt`, T.
    pub b_z: f64,
    /// Slope at the optimum (A = 1), contrast per tesla.
    pub slope_at_opt: f64,
    /// Shot-noise-limited sensitivity at the optimum, T·Hz^(-1/2).
    pub sensitivity_at_opt: f64,
}

const COARSE_GRID: usize = 256;
const GOLDEN_TOL: f64 = 1e-12;

/// Golden-section refinement of a maximum on [a, b].
fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let invphi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = b - invphi * (b - a);
    let mut x2 = a + invphi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > GOLDEN_TOL * b.abs().max(1e-300) {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Sensing time maximizing the transduction slope over τ ∈ (0, t_rot], with
/// the bias field set by the first-revival constraint.
///
/// A 256-point coarse grid brackets the peak and golden-section iteration
/// refines it; the refined point is never worse than the best grid point.
pub fn optimal_tau(
    rot: &RotationState,
    sensor: &SensorConfig,
) -> Result<OperatingPoint, OptimizerError> {
    let t_rot = rot.period();
    let objective = |tau: f64| drum_slope(tau, rot, sensor, 1.0);

    let mut best_idx = 0;
    let mut best_val = f64::NEG_INFINITY;
    let grid_tau = |i: usize| t_rot * (i + 1) as f64 / COARSE_GRID as f64;
    for i in 0..COARSE_GRID {
        let v = objective(grid_tau(i));
        if v > best_val {
            best_val = v;
            best_idx = i;
        }
    }
    let lo = if best_idx == 0 {
        t_rot / (2.0 * COARSE_GRID as f64)
    } else {
        grid_tau(best_idx - 1)
    };
    let hi = if best_idx + 1 >= COARSE_GRID {
        t_rot
    } else {
        grid_tau(best_idx + 1)
    };

    let mut tau_opt = golden_max(&objective, lo, hi);
    if objective(tau_opt) < best_val {
        tau_opt = grid_tau(best_idx);
    }

    let b_z = bias_field_for_tau(tau_opt, rot, sensor, 1)?;
    Ok(OperatingPoint {
        omega_rot: rot.omega_rot,
        tau_opt,
        b_z,
        slope_at_opt: objective(tau_opt),
        sensitivity_at_opt: drum_shot_noise_sensitivity(
            tau_opt,
            rot,
            sensor,
            SensitivityForm::FixedPenalty,
        ),
    })
}

/// Outcome of a rotation-speed sweep. Per-speed failures are collected and
/// reported alongside the successful points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub points: Vec<OperatingPoint>,
    /// (speed_hz, reason) for every speed that failed.
    pub failures: Vec<(f64, String)>,
}

/// Per-speed optimal operating points with the coherence time drawn from the
/// profile. Speeds are sorted and deduplicated first, so the outcome is
/// independent of input ordering.
pub fn speed_sweep(speeds_hz: &[f64], profile: &T2Profile, sensor: &SensorConfig) -> SweepOutcome {
    let mut speeds = speeds_hz.to_vec();
    speeds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    speeds.dedup();

    let results: Vec<Result<OperatingPoint, (f64, String)>> = map_indexed(speeds.len(), |i| {
        let speed = speeds[i];
        let rot = RotationState::new(TAU * speed, std::f64::consts::FRAC_PI_2);
        let t2 = profile.t2_at(speed).map_err(|e| (speed, e.to_string()))?;
        let mut local = *sensor;
        local.t2 = t2;
        optimal_tau(&rot, &local).map_err(|e| (speed, e.to_string()))
    });

    let mut outcome = SweepOutcome {
        points: Vec::new(),
        failures: Vec::new(),
    };
    for r in results {
        match r {
            Ok(p) => outcome.points.push(p),
            Err(f) => outcome.failures.push(f),
        }
    }
    outcome
}

/// Coherence time required for a target sensitivity gain over idealized
/// Ramsey: T₂ = T₂*·(π·g/4)². Unreachable whenever the target implies
/// T₂ ≤ T₂* (g ≤ 4/π).
pub fn required_t2_for_gain(
    target_gain: f64,
    sensor: &SensorConfig,
) -> Result<f64, OptimizerError> {
    let t2 = sensor.t2_star * (std::f64::consts::PI * target_gain / 4.0).powi(2);
    if t2 <= sensor.t2_star {
        return Err(OptimizerError::UnreachableGain(target_gain));
    }
    Ok(t2)
}
