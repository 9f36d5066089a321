//! Long-term stability analysis: polled mid-fringe contrast converts to
//! frequency perturbations, accumulates into total phase, and feeds the
//! overlapped Allan deviation. Power-law noise synthesis provides known
//! inputs for validating the estimator and the regime classifier.

use crate::exec::map_indexed;
use crate::model::SensorConfig;
use crate::rng::StreamSeed;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::io::{self, BufRead, Write};
use thiserror::Error;

/// Contrast magnitude beyond which the mid-fringe small-angle conversion to
/// frequency is no longer trustworthy (sin Φ deviates from Φ by >4%).
pub const LINEAR_WINDOW: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum StabilityError {
    #[error("slope must be non-zero")]
    ZeroSlope,
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("malformed CSV row {row}: {message}")]
    MalformedRow { row: usize, message: String },
}

/// Time-stamped mid-fringe contrast samples at a fixed polling interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastSeries {
    pub samples: Vec<f64>,
    /// Polling interval δT, s.
    pub poll_interval: f64,
    /// Time of the first sample, s.
    pub start_time: f64,
}

impl ContrastSeries {
    pub fn validate(&self) -> Result<(), StabilityError> {
        if self.samples.len() < 3 {
            return Err(StabilityError::InsufficientSamples {
                needed: 3,
                got: self.samples.len(),
            });
        }
        if !(self.poll_interval.is_finite() && self.poll_interval > 0.0) {
            return Err(StabilityError::MalformedRow {
                row: 0,
                message: "poll interval must be positive".into(),
            });
        }
        Ok(())
    }

    /// Parse a `time_s,contrast` CSV (header optional). The polling interval
    /// is taken from the first two rows and must stay uniform to 1%.
    pub fn from_csv<R: BufRead>(reader: R) -> Result<Self, StabilityError> {
        let mut times = Vec::new();
        let mut samples = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let row = idx + 1;
            let line = line.map_err(|e| StabilityError::MalformedRow {
                row,
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if row == 1 && trimmed.starts_with("time_s") {
                continue;
            }
            let mut parts = trimmed.split(',');
            let (t, s) = match (parts.next(), parts.next()) {
                (Some(t), Some(s)) => (t, s),
                _ => {
                    return Err(StabilityError::MalformedRow {
                        row,
                        message: "expected two comma-separated fields".into(),
                    })
                }
            };
            let t: f64 = t.trim().parse().map_err(|e| StabilityError::MalformedRow {
                row,
                message: format!("bad time: {e}"),
            })?;
            let s: f64 = s.trim().parse().map_err(|e| StabilityError::MalformedRow {
                row,
                message: format!("bad contrast: {e}"),
            })?;
            times.push(t);
            samples.push(s);
        }
        if samples.len() < 3 {
            return Err(StabilityError::InsufficientSamples {
                needed: 3,
                got: samples.len(),
            });
        }
        let dt = times[1] - times[0];
        if !(dt.is_finite() && dt > 0.0) {
            return Err(StabilityError::MalformedRow {
                row: 2,
                message: "time stamps must increase".into(),
            });
        }
        for (i, w) in times.windows(2).enumerate() {
            let step = w[1] - w[0];
            if (step - dt).abs() > 0.01 * dt {
                return Err(StabilityError::MalformedRow {
                    row: i + 2,
                    message: format!("non-uniform polling interval: {step} vs {dt}"),
                });
            }
        }
        Ok(Self {
            samples,
            poll_interval: dt,
            start_time: times[0],
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "time_s,contrast")?;
        for (i, s) in self.samples.iter().enumerate() {
            let t = self.start_time + i as f64 * self.poll_interval;
            writeln!(w, "{t},{s}")?;
        }
        Ok(())
    }
}

/// Contrast samples converted to frequency perturbations.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyConversion {
    /// ω_n = γ_e (d𝒮/dB)⁻¹ 𝒮_n, rad/s.
    pub frequencies: Vec<f64>,
    /// Samples outside the mid-fringe linear window; nonzero counts mean
    /// the linear conversion is underestimating the excursion.
    pub out_of_window: usize,
}

/// Convert polled contrast to frequency perturbations through the mid-fringe
/// slope: ω_n = γ_e·𝒮_n/(d𝒮/dB).
pub fn contrast_to_frequency(
    series: &ContrastSeries,
    slope: f64,
    sensor: &SensorConfig,
) -> Result<FrequencyConversion, StabilityError> {
    if slope == 0.0 || !slope.is_finite() {
        return Err(StabilityError::ZeroSlope);
    }
    let scale = sensor.gamma_e / slope;
    let out_of_window = series
        .samples
        .iter()
        .filter(|s| s.abs() > LINEAR_WINDOW)
        .count();
    Ok(FrequencyConversion {
        frequencies: series.samples.iter().map(|s| scale * s).collect(),
        out_of_window,
    })
}

/// Total accumulated phase: φ_n = Σ_{k≤n} δT·ω_k (length preserved).
pub fn cumulative_phase(frequencies: &[f64], poll_interval: f64) -> Vec<f64> {
    let mut acc = 0.0;
    frequencies
        .iter()
        .map(|w| {
            acc += poll_interval * w;
            acc
        })
        .collect()
}

/// Overlapped Allan deviation curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdevCurve {
    /// Averaging times m·δT, s, strictly increasing.
    pub averaging_times: Vec<f64>,
    /// σ_A at each averaging time, rad/s.
    pub deviations: Vec<f64>,
    /// Number of second-difference terms per point (N − 2m).
    pub sample_counts: Vec<usize>,
    /// Polling interval the phase record was sampled at, s.
    pub poll_interval: f64,
}

impl AdevCurve {
    /// Rough effective degrees of freedom per point: overlapped second
    /// differences are correlated over a 2m span, so (N − 2m)/(2m)
    /// independent chunks remain.
    pub fn effective_dof(&self) -> Vec<f64> {
        self.averaging_times
            .iter()
            .zip(&self.sample_counts)
            .map(|(tau, count)| {
                let m = (tau / self.poll_interval).round().max(1.0);
                *count as f64 / (2.0 * m)
            })
            .collect()
    }

    /// Deviations expressed as magnetic field, T.
    pub fn deviations_tesla(&self, gamma_e: f64) -> Vec<f64> {
        self.deviations.iter().map(|d| d / gamma_e).collect()
    }

    /// CSV with columns `tau_s,adev_rad_s,adev_t,n_terms`.
    pub fn write_csv<W: Write>(&self, gamma_e: f64, mut w: W) -> io::Result<()> {
        writeln!(w, "tau_s,adev_rad_s,adev_t,n_terms")?;
        for ((tau, dev), n) in self
            .averaging_times
            .iter()
            .zip(&self.deviations)
            .zip(&self.sample_counts)
        {
            writeln!(w, "{tau},{dev},{},{n}", dev / gamma_e)?;
        }
        Ok(())
    }
}

/// Octave-spaced averaging factors {1, 2, 4, ...} up to n/3.
pub fn default_m_grid(n_samples: usize) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut m = 1u64;
    while (m as usize) <= n_samples / 3 {
        grid.push(m);
        m *= 2;
    }
    grid
}

/// Overlapped Allan deviation of a total-phase record at averaging times
/// m·δT:
///
/// σ_A²(mδT) = 1/(2(mδT)²(N−2m)) · Σ_{i=0}^{N−2m−1} (φ_{i+2m} − 2φ_{i+m} + φ_i)²
///
/// Averaging factors that do not satisfy N − 2m ≥ 1 are skipped and returned
/// in the second element rather than failing the whole curve.
pub fn overlapped_adev(
    phase: &[f64],
    poll_interval: f64,
    m_values: &[u64],
) -> (AdevCurve, Vec<u64>) {
    let n = phase.len();
    let mut usable: Vec<u64> = Vec::new();
    let mut skipped = Vec::new();
    for &m in m_values {
        if m >= 1 && n > 2 * m as usize {
            usable.push(m);
        } else {
            skipped.push(m);
        }
    }
    usable.sort_unstable();
    usable.dedup();

    let points: Vec<(f64, f64, usize)> = map_indexed(usable.len(), |idx| {
        let m = usable[idx] as usize;
        let terms = n - 2 * m;
        let mut sum = 0.0;
        for i in 0..terms {
            let d = phase[i + 2 * m] - 2.0 * phase[i + m] + phase[i];
            sum += d * d;
        }
        let tau = usable[idx] as f64 * poll_interval;
        let var = sum / (2.0 * tau * tau * terms as f64);
        (tau, var.sqrt(), terms)
    });

    let mut curve = AdevCurve {
        averaging_times: Vec::with_capacity(points.len()),
        deviations: Vec::with_capacity(points.len()),
        sample_counts: Vec::with_capacity(points.len()),
        poll_interval,
    };
    for (tau, dev, terms) in points {
        curve.averaging_times.push(tau);
        curve.deviations.push(dev);
        curve.sample_counts.push(terms);
    }
    (curve, skipped)
}

/// Non-overlapped Allan deviation from the same phase record, for one
/// averaging factor. Block-averaged frequencies stride by m instead of
/// overlapping; the classic textbook estimator. Reference implementation
/// for checking [`overlapped_adev`]; the two coincide exactly at m = 1.
pub fn naive_adev(phase: &[f64], poll_interval: f64, m: u64) -> Option<(f64, usize)> {
    let n = phase.len();
    let m_us = m as usize;
    if m_us == 0 || n < 2 * m_us + 1 {
        return None;
    }
    let blocks = (n - 1) / m_us;
    if blocks < 2 {
        return None;
    }
    let tau = m as f64 * poll_interval;
    let y: Vec<f64> = (0..blocks)
        .map(|j| (phase[(j + 1) * m_us] - phase[j * m_us]) / tau)
        .collect();
    let terms = blocks - 1;
    let sum: f64 = y.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Some(((sum / (2.0 * terms as f64)).sqrt(), terms))
}

/// Statistical character of a synthesized contrast series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Independent Gaussian samples: white frequency noise after the linear
    /// contrast-to-frequency map (Allan slope −1/2).
    WhiteFrequency,
    /// Random walk: cumulative sum of Gaussian steps (Allan slope +1/2).
    RandomWalkFrequency,
    /// Deterministic linear ramp (Allan slope +1).
    Drift,
}

/// Seed-deterministic contrast series with the requested noise character.
/// `magnitude` is the per-sample standard deviation (white, random walk
/// step) or the per-sample increment (drift), in contrast units.
pub fn synthesize_noise(
    kind: NoiseKind,
    magnitude: f64,
    n_samples: usize,
    poll_interval: f64,
    seed: u64,
) -> ContrastSeries {
    assert!(n_samples >= 16, "need at least 16 samples");
    let mut rng = StreamSeed(seed).stream(0);
    let samples: Vec<f64> = match kind {
        NoiseKind::WhiteFrequency => (0..n_samples)
            .map(|_| magnitude * rng.sample::<f64, _>(StandardNormal))
            .collect(),
        NoiseKind::RandomWalkFrequency => {
            let mut acc = 0.0;
            (0..n_samples)
                .map(|_| {
                    acc += magnitude * rng.sample::<f64, _>(StandardNormal);
                    acc
                })
                .collect()
        }
        NoiseKind::Drift => (0..n_samples).map(|i| magnitude * i as f64).collect(),
    };
    ContrastSeries {
        samples,
        poll_interval,
        start_time: 0.0,
    }
}

/// Noise regime assigned to a section of an Allan curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeLabel {
    /// Log-log slope −1/2.
    WhiteFrequency,
    /// Log-log slope 0.
    Flicker,
    /// Log-log slope +1/2.
    RandomWalkOrDrift,
    Unlabeled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub tau_start: f64,
    pub tau_end: f64,
    pub slope: f64,
    pub label: RegimeLabel,
}

const LABEL_BAND: f64 = 0.15;
const MIN_REGIME_POINTS: usize = 5;
/// Curve points with fewer effective degrees of freedom than this are too
/// scattered to inform a slope fit.
const MIN_CLASSIFY_DOF: f64 = 8.0;

fn label_for_slope(slope: f64) -> RegimeLabel {
    if (slope + 0.5).abs() <= LABEL_BAND {
        RegimeLabel::WhiteFrequency
    } else if slope.abs() <= LABEL_BAND {
        RegimeLabel::Flicker
    } else if (slope - 0.5).abs() <= LABEL_BAND {
        RegimeLabel::RandomWalkOrDrift
    } else {
        RegimeLabel::Unlabeled
    }
}

fn fit_line(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

fn sse(points: &[(f64, f64)]) -> f64 {
    let (a, b) = fit_line(points);
    points.iter().map(|p| (p.1 - (a * p.0 + b)).powi(2)).sum()
}

/// Piecewise log-log classification of an Allan curve.
///
/// Fits one line to (ln τ, ln σ) and accepts a single breakpoint when the
/// two-segment fit reduces the residual by at least a factor of four with a
/// minimum of five points per side. Slopes map to labels within ±0.15 of
/// {−1/2, 0, +1/2}; anything else is unlabeled. Points with too few
/// effective degrees of freedom, or zero deviation, are excluded from the
/// fits; a degenerate all-zero curve yields one unlabeled regime.
pub fn classify_regimes(curve: &AdevCurve) -> Vec<Regime> {
    let dof = curve.effective_dof();
    let points: Vec<(f64, f64)> = curve
        .averaging_times
        .iter()
        .zip(&curve.deviations)
        .zip(&dof)
        .filter(|((_, d), edf)| **d > 0.0 && **edf >= MIN_CLASSIFY_DOF)
        .map(|((t, d), _)| (t.ln(), d.ln()))
        .collect();

    let span = |points: &[(f64, f64)]| -> (f64, f64) {
        (points[0].0.exp(), points[points.len() - 1].0.exp())
    };

    if points.len() < MIN_REGIME_POINTS {
        let (t0, t1) = if curve.averaging_times.is_empty() {
            (0.0, 0.0)
        } else {
            (
                curve.averaging_times[0],
                *curve.averaging_times.last().unwrap(),
            )
        };
        return vec![Regime {
            tau_start: t0,
            tau_end: t1,
            slope: 0.0,
            label: RegimeLabel::Unlabeled,
        }];
    }

    let single_sse = sse(&points);
    let (single_slope, _) = fit_line(&points);

    let mut best: Option<(usize, f64)> = None;
    if points.len() >= 2 * MIN_REGIME_POINTS {
        for k in MIN_REGIME_POINTS..=points.len() - MIN_REGIME_POINTS {
            let total = sse(&points[..k]) + sse(&points[k..]);
            if best.is_none_or(|(_, b)| total < b) {
                best = Some((k, total));
            }
        }
    }

    if let Some((k, split_sse)) = best {
        if split_sse < 0.25 * single_sse {
            let (s1, _) = fit_line(&points[..k]);
            let (s2, _) = fit_line(&points[k..]);
            let (a0, a1) = span(&points[..k]);
            let (b0, b1) = span(&points[k..]);
            return vec![
                Regime {
                    tau_start: a0,
                    tau_end: a1,
                    slope: s1,
                    label: label_for_slope(s1),
                },
                Regime {
                    tau_start: b0,
                    tau_end: b1,
                    slope: s2,
                    label: label_for_slope(s2),
                },
            ];
        }
    }

    let (t0, t1) = span(&points);
    vec![Regime {
        tau_start: t0,
        tau_end: t1,
        slope: single_slope,
        label: label_for_slope(single_slope),
    }]
}
