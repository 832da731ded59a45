//! Qualitative classification of a sampled signal as a sustained, damped or
//! absent oscillation.

use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};

/// Peak-to-trough amplitudes at or below this are treated as numerical ripple.
pub const DEFAULT_AMP_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_TRANSIENT_FRACTION: f64 = 0.5;
/// Relative spread allowed among the last three amplitudes of a sustained
/// oscillation, and the minimum overall shrink of a damped one.
pub const AMP_REL_TOL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OscillationClass {
    Sustained,
    Damped,
    Monotone,
}

impl std::fmt::Display for OscillationClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OscillationClass::Sustained => "sustained",
            OscillationClass::Damped => "damped",
            OscillationClass::Monotone => "monotone",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationOptions {
    pub transient_fraction: f64,
    pub amp_threshold: f64,
}

impl Default for OscillationOptions {
    fn default() -> Self {
        Self {
            transient_fraction: DEFAULT_TRANSIENT_FRACTION,
            amp_threshold: DEFAULT_AMP_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub class: OscillationClass,
    /// Mean of the last three amplitudes when sustained, the last amplitude
    /// above threshold when damped, the window range otherwise.
    pub amplitude: f64,
    /// Mean spacing of successive maxima; NaN with fewer than two maxima.
    pub period: f64,
}

#[derive(Debug, Clone, Copy)]
struct Extremum {
    t: f64,
    value: f64,
    is_max: bool,
}

/// Vertex of the parabola through three samples around a discrete extremum.
fn refine(t: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
    let curv = a - 2.0 * b + c;
    let dt_left = t[i] - t[i - 1];
    let dt_right = t[i + 1] - t[i];
    if curv == 0.0 || (dt_left - dt_right).abs() > 1e-9 * dt_left.max(dt_right) {
        return (t[i], b);
    }
    let offset = (0.5 * (a - c) / curv).clamp(-0.5, 0.5);
    (t[i] + offset * dt_left, b - 0.25 * (a - c) * offset)
}

fn extrema(t: &[f64], y: &[f64]) -> Vec<Extremum> {
    let mut out: Vec<Extremum> = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        let is_max = y[i] > y[i - 1] && y[i] >= y[i + 1];
        let is_min = y[i] < y[i - 1] && y[i] <= y[i + 1];
        if !(is_max || is_min) {
            continue;
        }
        let (te, ve) = refine(t, y, i);
        let e = Extremum { t: te, value: ve, is_max };
        // Keep the extremes alternating; of two like neighbours keep the stronger.
        match out.last_mut() {
            Some(last) if last.is_max == is_max => {
                if (is_max && ve > last.value) || (!is_max && ve < last.value) {
                    *last = e;
                }
            }
            _ => out.push(e),
        }
    }
    out
}

/// Classifies `y(t)` after discarding the leading `transient_fraction` of the
/// time span.
pub fn classify_series(t: &[f64], y: &[f64], opts: OscillationOptions) -> Result<OscillationReport> {
    if t.len() != y.len() {
        return Err(Error::InvalidState("time and value arrays differ in length".into()));
    }
    if !(0.0..1.0).contains(&opts.transient_fraction) {
        return Err(Error::InvalidConfig(format!(
            "transient fraction must lie in [0, 1), got {}",
            opts.transient_fraction
        )));
    }
    if t.is_empty() {
        return Err(Error::InvalidState("empty signal".into()));
    }
    let cut = t[0] + opts.transient_fraction * (t[t.len() - 1] - t[0]);
    let start = t.iter().position(|ti| *ti >= cut).unwrap_or(t.len());
    let (tw, yw) = (&t[start..], &y[start..]);
    if tw.len() < 3 {
        return Err(Error::InvalidState(format!(
            "analysis window has {} samples, need at least 3",
            tw.len()
        )));
    }
    let ext = extrema(tw, yw);
    let amps: Vec<f64> = ext.windows(2).map(|w| (w[1].value - w[0].value).abs()).collect();
    let peaks: Vec<f64> = ext.iter().filter(|e| e.is_max).map(|e| e.t).collect();
    let period = if peaks.len() >= 2 {
        (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64
    } else {
        f64::NAN
    };
    let thr = opts.amp_threshold;

    if amps.len() >= 3 {
        let last = &amps[amps.len() - 3..];
        let above = last.iter().all(|a| *a > thr);
        let hi = last.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = last.iter().cloned().fold(f64::INFINITY, f64::min);
        if above && hi - lo < AMP_REL_TOL * hi {
            return Ok(OscillationReport {
                class: OscillationClass::Sustained,
                amplitude: last.iter().sum::<f64>() / 3.0,
                period,
            });
        }
    }

    let run: Vec<f64> = amps.iter().copied().take_while(|a| *a > thr).collect();
    if run.len() >= 2
        && run.windows(2).all(|w| w[1] < w[0])
        && run[run.len() - 1] < (1.0 - AMP_REL_TOL) * run[0]
    {
        return Ok(OscillationReport {
            class: OscillationClass::Damped,
            amplitude: run[run.len() - 1],
            period,
        });
    }

    let hi = yw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = yw.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(OscillationReport {
        class: OscillationClass::Monotone,
        amplitude: hi - lo,
        period,
    })
}

/// Classifies one component of a trajectory with the default threshold.
pub fn detect_oscillation(traj: &Trajectory, transient_fraction: f64, component: usize) -> Result<OscillationReport> {
    let dim = traj.variant.dim(traj.n);
    if component >= dim {
        return Err(Error::InvalidState(format!(
            "component {component} out of range for a {dim}-dimensional state"
        )));
    }
    classify_series(
        &traj.times,
        &traj.component(component),
        OscillationOptions {
            transient_fraction,
            ..OscillationOptions::default()
        },
    )
}
