//! Sensor, rotation and field configuration, plus the handful of closed-form
//! relations that tie them together: the up-converted Zeeman shift, the
//! rotational pseudo-field acting on the ¹³C bath, and echo-revival timing.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

/// Electron gyromagnetic ratio, rad s⁻¹ T⁻¹ (γ_e/2π = 28 kHz/µT).
pub const GAMMA_E: f64 = TAU * 2.8e10;

/// ¹³C gyromagnetic ratio, Hz/T (10.71 Hz/µT). Non-angular by convention:
/// multiplying by a field gives the Larmor frequency in Hz directly.
pub const GAMMA_C13: f64 = 1.071e7;

/// NV zero-field splitting, Hz. Carried for completeness; it cancels in all
/// transition-energy differences used here.
pub const D_ZFS: f64 = 2.87e9;

/// Variance-limit threshold above which transverse fields are no longer
/// "weak" relative to the axial bias and the energy-level approximation
/// degrades. See [`FieldConfig::weak_field_warnings`].
pub const WEAK_FIELD_RATIO: f64 = 0.1;

/// Finite and strictly positive; rejects NaN as well.
fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    /// Effective axial field (bias plus pseudo-field) must be positive for a
    /// revival to exist.
    #[error("non-positive effective field: b_z + b_omega = {0:.3e} T")]
    NonPositiveEffectiveField(f64),
    /// Inverting the revival relation demanded a bias field at or below zero:
    /// the pseudo-field alone already exceeds the required Larmor rate.
    #[error("required bias field is non-positive: {0:.3e} T")]
    NegativeBiasField(f64),
    /// A configuration invariant was violated.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Photon-readout parameters for a single optical readout window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutModel {
    /// Steady-state photon count rate 𝒩, photons/s.
    pub count_rate: f64,
    /// Maximum readout contrast ε between the bright and dark spin states.
    pub contrast_eps: f64,
    /// Laser-pulse integration window t_L, s.
    pub t_laser: f64,
    /// Optional readout-efficiency override. When set, analytic sensitivity
    /// formulas use this value instead of the closed-form estimate; photon
    /// simulation always uses the raw (count_rate, contrast_eps, t_laser).
    pub c_override: Option<f64>,
}

impl Default for ReadoutModel {
    fn default() -> Self {
        Self {
            count_rate: 9.0e6,
            contrast_eps: 0.1,
            t_laser: 500e-9,
            c_override: Some(0.1),
        }
    }
}

impl ReadoutModel {
    /// Mean photons per readout window for a fully bright (m_S = 0) state.
    pub fn photons_per_window(&self) -> f64 {
        self.count_rate * self.t_laser
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !positive(self.count_rate) {
            return Err(ModelError::InvalidConfig(
                "readout.count_rate must be > 0".into(),
            ));
        }
        if !positive(self.contrast_eps) || self.contrast_eps >= 1.0 {
            return Err(ModelError::InvalidConfig(
                "readout.contrast_eps must lie in (0, 1)".into(),
            ));
        }
        if !positive(self.t_laser) {
            return Err(ModelError::InvalidConfig(
                "readout.t_laser must be > 0".into(),
            ));
        }
        if let Some(c) = self.c_override {
            if !positive(c) || c > 1.0 {
                return Err(ModelError::InvalidConfig(
                    "readout.c_override must lie in (0, 1]".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Static sensor properties: NV orientation, gyromagnetic ratios, coherence
/// times and the stretched-exponential decoherence exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorConfig {
    /// Angle between the NV axis and the rotation axis, rad.
    pub theta_nv: f64,
    /// Electron gyromagnetic ratio, rad s⁻¹ T⁻¹.
    pub gamma_e: f64,
    /// ¹³C gyromagnetic ratio, Hz/T.
    pub gamma_c13: f64,
    /// Zero-field splitting, Hz (unused in energy differences).
    pub d_zfs: f64,
    /// Spin-echo coherence time T₂, s.
    pub t2: f64,
    /// Inhomogeneous dephasing time T₂*, s.
    pub t2_star: f64,
    /// Decoherence stretch exponent n in exp(−(τ/T₂)ⁿ).
    pub n_exp: f64,
    pub readout: ReadoutModel,
}

impl Default for SensorConfig {
    /// Demonstration-grade defaults: θ_NV = 30.2° (sin θ ≈ 0.5), T₂ = 250 µs,
    /// T₂* = 360 ns, n = 3.
    fn default() -> Self {
        Self {
            theta_nv: 30.2_f64.to_radians(),
            gamma_e: GAMMA_E,
            gamma_c13: GAMMA_C13,
            d_zfs: D_ZFS,
            t2: 250e-6,
            t2_star: 360e-9,
            n_exp: 3.0,
            readout: ReadoutModel::default(),
        }
    }
}

impl SensorConfig {
    pub fn sin_theta(&self) -> f64 {
        self.theta_nv.sin()
    }

    /// Echo envelope exp(−(τ/T₂)ⁿ).
    pub fn echo_envelope(&self, tau: f64) -> f64 {
        (-(tau / self.t2).powf(self.n_exp)).exp()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=PI / 2.0).contains(&self.theta_nv) {
            return Err(ModelError::InvalidConfig(
                "sensor.theta_nv must lie in [0, pi/2]".into(),
            ));
        }
        if !positive(self.gamma_e) {
            return Err(ModelError::InvalidConfig(
                "sensor.gamma_e must be > 0".into(),
            ));
        }
        if !positive(self.gamma_c13) {
            return Err(ModelError::InvalidConfig(
                "sensor.gamma_c13 must be > 0".into(),
            ));
        }
        if !positive(self.t2_star) || !positive(self.t2) || self.t2 <= self.t2_star {
            return Err(ModelError::InvalidConfig(
                "sensor coherence times must satisfy t2 > t2_star > 0".into(),
            ));
        }
        if !positive(self.n_exp) {
            return Err(ModelError::InvalidConfig("sensor.n_exp must be > 0".into()));
        }
        self.readout.validate()
    }
}

/// Rotation of the diamond about the lab z-axis.
///
/// `omega_rot` is signed: positive rotation adds to the ¹³C Larmor precession
/// frequency, so all direction effects flow through the sign of
/// [`pseudo_field`]. The rotation period is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationState {
    /// Signed rotation angular frequency, rad/s.
    pub omega_rot: f64,
    /// Initial orientation phase φ₀, rad, referenced to the echo π-pulse.
    pub phi0: f64,
}

impl Default for RotationState {
    /// 3.75 kHz rotation with the π-pulse at the field zero-crossing
    /// (φ₀ = π/2, maximum phase accumulation).
    fn default() -> Self {
        Self {
            omega_rot: TAU * 3.75e3,
            phi0: PI / 2.0,
        }
    }
}

impl RotationState {
    pub fn new(omega_rot: f64, phi0: f64) -> Self {
        Self { omega_rot, phi0 }
    }

    /// Rotation frequency in Hz, signed.
    pub fn rotation_hz(&self) -> f64 {
        self.omega_rot / TAU
    }

    /// Rotation period t_rot = 2π/|ω_rot|, s.
    pub fn period(&self) -> f64 {
        TAU / self.omega_rot.abs()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.omega_rot == 0.0 || !self.omega_rot.is_finite() {
            return Err(ModelError::InvalidConfig(
                "rotation.omega_rot must be finite and non-zero".into(),
            ));
        }
        Ok(())
    }
}

/// Applied dc magnetic fields in the lab frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    /// Axial bias field B_z, T.
    pub b_z: f64,
    /// Transverse test field B_x, T.
    pub b_x: f64,
    /// Transverse test field B_y, T.
    pub b_y: f64,
    /// Transverse nulling offset B_x0, T.
    pub b_x0: f64,
    /// Transverse nulling offset B_y0, T.
    pub b_y0: f64,
}

impl FieldConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [
            ("b_z", self.b_z),
            ("b_x", self.b_x),
            ("b_y", self.b_y),
            ("b_x0", self.b_x0),
            ("b_y0", self.b_y0),
        ] {
            if !v.is_finite() {
                return Err(ModelError::InvalidConfig(format!(
                    "fields.{name} must be finite"
                )));
            }
        }
        Ok(())
    }

    /// Transverse components are assumed small against the bias; report any
    /// that exceed [`WEAK_FIELD_RATIO`] instead of rejecting them.
    pub fn weak_field_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        if self.b_z == 0.0 {
            if self.b_x != 0.0 || self.b_y != 0.0 {
                warnings.push("transverse field applied with zero axial bias".to_string());
            }
            return warnings;
        }
        for (name, v) in [("b_x", self.b_x), ("b_y", self.b_y)] {
            let ratio = (v / self.b_z).abs();
            if ratio > WEAK_FIELD_RATIO {
                warnings.push(format!(
                    "|{name}|/b_z = {ratio:.3} exceeds the weak-field ratio {WEAK_FIELD_RATIO}"
                ));
            }
        }
        warnings
    }
}

/// Time-dependent part of the m_S = 0 ↔ −1 transition shift during rotation:
/// γ_e B_x sin θ_NV cos(ω_rot t − φ₀), rad/s.
///
/// A dc transverse field in the lab frame is an ac field at ω_rot in the NV
/// frame; this is the quantity the echo sequence accumulates phase from.
pub fn up_converted_shift(
    t: f64,
    sensor: &SensorConfig,
    rot: &RotationState,
    fields: &FieldConfig,
) -> f64 {
    sensor.gamma_e * fields.b_x * sensor.sin_theta() * (rot.omega_rot * t - rot.phi0).cos()
}

/// Transverse shift for arbitrary (B_x, B_y): the y component enters a
/// quarter period out of phase with the x component.
pub fn transverse_shift(
    t: f64,
    sensor: &SensorConfig,
    rot: &RotationState,
    b_x: f64,
    b_y: f64,
) -> f64 {
    let arg = rot.omega_rot * t - rot.phi0;
    sensor.gamma_e * sensor.sin_theta() * (b_x * arg.cos() + b_y * arg.sin())
}

/// Magnetic pseudo-field experienced by the ¹³C nuclei in the rotating frame,
/// B_ω = f_rot/γ₁₃ (tesla), signed with the rotation direction.
pub fn pseudo_field(rot: &RotationState, sensor: &SensorConfig) -> f64 {
    rot.rotation_hz() / sensor.gamma_c13
}

/// Time of the n_c-th spin-echo contrast revival, s.
///
/// Revivals are spaced at twice the effective ¹³C Larmor period, so the first
/// revival (n_c = 1) sits at τ = 2/(γ₁₃(B_z + B_ω)) with γ₁₃ in Hz/T and the
/// pseudo-field B_ω signed by rotation direction.
pub fn revival_time(
    b_z: f64,
    rot: &RotationState,
    sensor: &SensorConfig,
    n_c: u32,
) -> Result<f64, ModelError> {
    assert!(n_c >= 1, "revival index must be positive");
    let b_eff = b_z + pseudo_field(rot, sensor);
    if b_eff <= 0.0 {
        return Err(ModelError::NonPositiveEffectiveField(b_eff));
    }
    Ok(2.0 * f64::from(n_c) / (sensor.gamma_c13 * b_eff))
}

/// Bias field that places the n_c-th revival at `tau`; exact inverse of
/// [`revival_time`].
pub fn bias_field_for_tau(
    tau: f64,
    rot: &RotationState,
    sensor: &SensorConfig,
    n_c: u32,
) -> Result<f64, ModelError> {
    assert!(n_c >= 1, "revival index must be positive");
    assert!(tau > 0.0, "tau must be positive");
    let b_z = 2.0 * f64::from(n_c) / (sensor.gamma_c13 * tau) - pseudo_field(rot, sensor);
    if b_z <= 0.0 {
        return Err(ModelError::NegativeBiasField(b_z));
    }
    Ok(b_z)
}
