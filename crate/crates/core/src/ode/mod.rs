//! Adaptive integration onto a uniform output grid.
//!
//! Two one-step methods share the driver: Dormand-Prince 5(4) with a PI
//! step controller for non-stiff runs, and a five-stage L-stable SDIRK of
//! order 4 for small `eps`. Steps are shortened to land exactly on grid
//! points, so no dense output is needed.

mod dopri;
mod oscillation;
mod sdirk;

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::numeric::fmt15;
use crate::state::{StateVector, Variant};

pub use oscillation::{
    classify_series, detect_oscillation, OscillationClass, OscillationOptions, OscillationReport,
    DEFAULT_AMP_THRESHOLD, DEFAULT_TRANSIENT_FRACTION,
};

/// An autonomous or time-dependent system `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);

    /// Fills `jac` with `df/dy` and returns `true` when an analytic form is
    /// available; otherwise the implicit method differentiates numerically.
    fn jacobian(&self, _t: f64, _y: &[f64], _jac: &mut DMatrix<f64>) -> bool {
        false
    }
}

impl<F> OdeSystem for (usize, F)
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.0
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (self.1)(t, y, dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Dormand-Prince 5(4).
    ExplicitEmbedded,
    /// L-stable SDIRK, order 4 with an embedded order-3 estimate.
    ImplicitStiff,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" | "explicit-embedded" | "dopri5" => Ok(Method::ExplicitEmbedded),
            "implicit" | "implicit-stiff" | "sdirk" => Ok(Method::ImplicitStiff),
            other => Err(Error::InvalidConfig(format!(
                "unknown method '{other}' (expected explicit-embedded or implicit-stiff)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_end: f64,
    /// Cap on attempted steps, accepted and rejected together.
    pub max_steps: usize,
    pub method: Method,
    pub sample_dt: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            t_end: 100.0,
            max_steps: 1_000_000,
            method: Method::ImplicitStiff,
            sample_dt: 0.5,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(v > 0.0 && v <= 1e-2) {
                return Err(Error::InvalidConfig(format!("{name} must lie in (0, 1e-2], got {v}")));
            }
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidConfig(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.sample_dt > 0.0 && self.sample_dt <= self.t_end) {
            return Err(Error::InvalidConfig(format!(
                "sample_dt must lie in (0, t_end], got {}",
                self.sample_dt
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        Ok(())
    }

    /// Uniform grid `0, dt, 2 dt, ..` closed by `t_end`.
    pub fn grid(&self) -> Vec<f64> {
        let m = (self.t_end / self.sample_dt - 1e-9).ceil() as usize;
        let mut times: Vec<f64> = (0..m).map(|i| i as f64 * self.sample_dt).collect();
        times.push(self.t_end);
        times
    }
}

/// Samples on the output grid for a raw system.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub accepted: usize,
    pub rejected: usize,
}

/// Weighted RMS norm used by both error controllers.
pub(crate) fn err_norm(err: &[f64], y0: &[f64], y1: &[f64], rtol: f64, atol: f64) -> f64 {
    let n = err.len().max(1) as f64;
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sk = atol + rtol * a.abs().max(b.abs());
            (e / sk).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

/// Starting step from the size of `y0`, `f(y0)` and one Euler probe.
pub(crate) fn initial_step<S: OdeSystem + ?Sized>(sys: &S, y0: &[f64], f0: &[f64], order: i32, cfg: &IntegratorConfig) -> f64 {
    let dim = y0.len();
    let sk: Vec<f64> = y0.iter().map(|y| cfg.abs_tol + cfg.rel_tol * y.abs()).collect();
    let rms = |v: &[f64]| (v.iter().zip(&sk).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / dim.max(1) as f64).sqrt();
    let d0 = rms(y0);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let mut f1 = vec![0.0; dim];
    sys.rhs(h0, &y1, &mut f1);
    let df: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&df) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / (order as f64 + 1.0))
    };
    (100.0 * h0).min(h1).min(cfg.t_end)
}

/// Result of one attempted step.
pub(crate) enum StepOutcome {
    Accepted,
    Rejected { err: f64 },
    /// Newton failed to converge or produced non-finite values.
    Failed,
}

/// A one-step method with an embedded error estimate.
pub(crate) trait Stepper {
    const ORDER: i32;

    /// Attempts a step of size `h` from `(t, y)`. On acceptance writes the new
    /// state into `y_new`, its derivative into `f_new`, and returns the
    /// proposed next step through `h_next`.
    #[allow(clippy::too_many_arguments)]
    fn step<S: OdeSystem + ?Sized>(
        &mut self,
        sys: &S,
        t: f64,
        y: &[f64],
        f: &[f64],
        h: f64,
        cfg: &IntegratorConfig,
        y_new: &mut [f64],
        f_new: &mut [f64],
        h_next: &mut f64,
    ) -> StepOutcome;
}

fn drive<S: OdeSystem + ?Sized, M: Stepper>(sys: &S, y0: &[f64], cfg: &IntegratorConfig, mut method: M) -> Result<Solution> {
    let dim = sys.dim();
    let grid = cfg.grid();
    let mut states = Vec::with_capacity(grid.len());
    states.push(y0.to_vec());
    let mut y = y0.to_vec();
    let mut f = vec![0.0; dim];
    sys.rhs(0.0, &y, &mut f);
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: 0.0 });
    }
    let mut y_new = vec![0.0; dim];
    let mut f_new = vec![0.0; dim];
    let mut t = 0.0;
    let mut h = initial_step(sys, &y, &f, M::ORDER, cfg);
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut last_failure_nonfinite = false;

    for &target in &grid[1..] {
        while t < target {
            if accepted + rejected >= cfg.max_steps {
                return Err(Error::MaxStepsExceeded {
                    max_steps: cfg.max_steps,
                    t,
                    h,
                    accepted,
                    rejected,
                });
            }
            let remaining = target - t;
            // Stretch by up to 1% rather than leave a sliver before the grid point.
            let clamped = h >= remaining * 0.99;
            let h_try = if clamped { remaining } else { h };
            if h_try <= 1e-14 * t.abs().max(1.0) {
                return Err(if last_failure_nonfinite {
                    Error::NonFinite { t }
                } else {
                    Error::StepSizeUnderflow { t, h: h_try }
                });
            }
            let mut h_next = h_try;
            match method.step(sys, t, &y, &f, h_try, cfg, &mut y_new, &mut f_new, &mut h_next) {
                StepOutcome::Accepted => {
                    if y_new.iter().any(|v| !v.is_finite()) {
                        return Err(Error::NonFinite { t: t + h_try });
                    }
                    accepted += 1;
                    last_failure_nonfinite = false;
                    t = if clamped { target } else { t + h_try };
                    std::mem::swap(&mut y, &mut y_new);
                    std::mem::swap(&mut f, &mut f_new);
                    // A shortened step says little about the natural scale.
                    h = if clamped { h_next.max(h) } else { h_next };
                }
                StepOutcome::Rejected { err } => {
                    rejected += 1;
                    last_failure_nonfinite = !err.is_finite();
                    h = h_next;
                }
                StepOutcome::Failed => {
                    rejected += 1;
                    last_failure_nonfinite = true;
                    h = 0.5 * h_try;
                }
            }
        }
        states.push(y.clone());
    }
    Ok(Solution {
        times: grid,
        states,
        accepted,
        rejected,
    })
}

/// Integrates a raw system from `t = 0` over the configured grid.
pub fn solve<S: OdeSystem + ?Sized>(sys: &S, y0: &[f64], cfg: &IntegratorConfig) -> Result<Solution> {
    cfg.validate()?;
    if y0.len() != sys.dim() {
        return Err(Error::InvalidState(format!(
            "initial state has {} entries, system has {}",
            y0.len(),
            sys.dim()
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: 0.0 });
    }
    match cfg.method {
        Method::ExplicitEmbedded => drive(sys, y0, cfg, dopri::Dopri5::new(sys.dim())),
        Method::ImplicitStiff => drive(sys, y0, cfg, sdirk::Sdirk4::new(sys.dim())),
    }
}

/// Samples of one model run on the uniform output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub variant: Variant,
    pub n: usize,
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub n_steps_accepted: usize,
    pub n_steps_rejected: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory has at least two samples")
    }

    /// One state component over time.
    pub fn component(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.values()[index]).collect()
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.variant.variable_names(self.n)
    }

    /// CSV with header `t,<variables>` and 15 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,{}", self.variable_names().join(","))?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut line = fmt15(*t);
            for v in s.values() {
                line.push(',');
                line.push_str(&fmt15(*v));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Integrates one model level from a validated initial state.
pub fn integrate(model: &Model, s0: &StateVector, cfg: &IntegratorConfig) -> Result<Trajectory> {
    if s0.variant() != model.variant() {
        return Err(Error::InvalidState(format!(
            "{} initial state passed to the {} model",
            s0.variant(),
            model.variant()
        )));
    }
    s0.validate(model.n())?;
    let sol = solve(model, s0.values(), cfg)?;
    let states = sol
        .states
        .into_iter()
        .zip(&sol.times)
        .map(|(v, t)| StateVector::new(model.variant(), v).map_err(|_| Error::NonFinite { t: *t }))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        variant: model.variant(),
        n: model.n(),
        times: sol.times,
        states,
        n_steps_accepted: sol.accepted,
        n_steps_rejected: sol.rejected,
    })
}
