//! Distance between a model level and its reduction as the fast timescale
//! parameter shrinks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::ode::{integrate, IntegratorConfig, Trajectory};
use crate::params::ModelParams;
use crate::state::{StateVector, Variant};

/// One reduction arrow between model levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    /// Dimers fast: `eps2 -> 0`.
    FullToNoDimers,
    /// Binding fast: `eps1 -> 0`.
    FullToWithDimers,
    /// Binding fast: `eps1 -> 0`.
    NoDimersToClassical,
    /// Dimers fast: `eps2 -> 0`.
    WithDimersToClassical,
}

/// Which timescale parameter a reduction removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Epsilon {
    Eps1,
    Eps2,
}

impl Reduction {
    pub const ALL: [Reduction; 4] = [
        Reduction::FullToNoDimers,
        Reduction::FullToWithDimers,
        Reduction::NoDimersToClassical,
        Reduction::WithDimersToClassical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Reduction::FullToNoDimers => "full-to-no-dimers",
            Reduction::FullToWithDimers => "full-to-with-dimers",
            Reduction::NoDimersToClassical => "no-dimers-to-classical",
            Reduction::WithDimersToClassical => "with-dimers-to-classical",
        }
    }

    pub fn varied(self) -> Epsilon {
        match self {
            Reduction::FullToNoDimers | Reduction::WithDimersToClassical => Epsilon::Eps2,
            Reduction::FullToWithDimers | Reduction::NoDimersToClassical => Epsilon::Eps1,
        }
    }

    /// `(finer, reduced)` model levels.
    pub fn levels(self) -> (Variant, Variant) {
        match self {
            Reduction::FullToNoDimers => (Variant::Full, Variant::NoDimers),
            Reduction::FullToWithDimers => (Variant::Full, Variant::WithDimers),
            Reduction::NoDimersToClassical => (Variant::NoDimers, Variant::Classical),
            Reduction::WithDimersToClassical => (Variant::WithDimers, Variant::Classical),
        }
    }
}

impl std::fmt::Display for Reduction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Reduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Reduction::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown reduction '{s}' (expected one of {})",
                    Reduction::ALL.map(|r| r.name()).join(", ")
                ))
            })
    }
}

/// Full-model state split into its parts; other levels are projections.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    pub x: Vec<f64>,
    pub y1: f64,
    pub y2: f64,
    pub z: f64,
}

impl FullState {
    /// Uniform occupancies, `y1 = 0.5`, `y2 = z = 0`: every fast variable
    /// starts off its quasi-stationary manifold.
    pub fn sweep_default(n: usize) -> Self {
        Self {
            x: vec![1.0 / (n as f64 + 1.0); n],
            y1: 0.5,
            y2: 0.0,
            z: 0.0,
        }
    }

    pub fn project(&self, variant: Variant) -> Result<StateVector> {
        let values = match variant {
            Variant::Full => [self.x.as_slice(), &[self.y1, self.y2, self.z]].concat(),
            Variant::NoDimers => [self.x.as_slice(), &[self.y1, self.z]].concat(),
            Variant::WithDimers => vec![self.y1, self.y2, self.z],
            Variant::Classical => vec![self.y1, self.z],
        };
        StateVector::new(variant, values)
    }
}

/// Slow and fast parts of a state, the fast part of a reduced state being
/// its quasi-stationary value.
fn split(p: &ModelParams, r: Reduction, s: &[f64], reduced: bool) -> (Vec<f64>, Vec<f64>) {
    let n = p.n();
    match (r, reduced) {
        (Reduction::FullToNoDimers, false) => ([&s[..n], &[s[n], s[n + 2]]].concat(), vec![s[n + 1]]),
        (Reduction::FullToNoDimers, true) => {
            let y2 = crate::model::phi(p, &s[..n], s[n]).unwrap_or_else(|_| phi_loose(p, &s[..n], s[n]));
            ([&s[..n], &[s[n], s[n + 1]]].concat(), vec![y2])
        }
        (Reduction::FullToWithDimers, false) => (s[n..].to_vec(), s[..n].to_vec()),
        (Reduction::FullToWithDimers, true) => (s.to_vec(), p.poly().occupancy(s[1])),
        (Reduction::NoDimersToClassical, false) => (s[n..].to_vec(), s[..n].to_vec()),
        (Reduction::NoDimersToClassical, true) => (s.to_vec(), p.poly().occupancy(s[0] * s[0])),
        (Reduction::WithDimersToClassical, false) => (vec![s[0], s[2]], vec![s[1]]),
        (Reduction::WithDimersToClassical, true) => (s.to_vec(), vec![s[0] * s[0]]),
    }
}

/// `phi` without domain checks, for states nudged out of the domain by
/// integration error.
fn phi_loose(p: &ModelParams, x: &[f64], y1: f64) -> f64 {
    let clamped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let scaled: Vec<f64> = if total > 1.0 {
        clamped.iter().map(|v| v / total).collect()
    } else {
        clamped
    };
    crate::model::phi(p, &scaled, y1.max(0.0)).unwrap_or(f64::NAN)
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub reduction: Reduction,
    pub varied: Epsilon,
    pub eps_values: Vec<f64>,
    /// Start of the post-layer window for each `eps`.
    pub t_layer: Vec<f64>,
    /// Slow-variable distance over `[0, T]`.
    pub slow_full: Vec<f64>,
    /// Slow-variable distance over `[t_layer, T]`.
    pub slow_post_layer: Vec<f64>,
    /// Fast-variable distance over `[0, T]`; includes the initial layer.
    pub fast_full: Vec<f64>,
    /// Fast-variable distance over `[t_layer, T]`.
    pub fast_post_layer: Vec<f64>,
    /// `max(slow_full, fast_post_layer)`: slow variables over the whole
    /// interval, fast variables outside the initial layer.
    pub sup_norm_post_layer: Vec<f64>,
    /// Integrator failures; a failed `eps` has NaN distances.
    pub failures: Vec<Option<String>>,
}

/// Parameters of a sweep beyond the reduction and base parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub eps_values: Vec<f64>,
    pub t_end: f64,
    /// Fixed window start; `None` uses `10 eps`.
    pub t_layer: Option<f64>,
    pub integrator: IntegratorConfig,
}

pub const T_LAYER_FACTOR: f64 = 10.0;

impl SweepSpec {
    /// Decade grid `1e-1..1e-4`, `T = 100`, stiff integrator at tight tolerance.
    pub fn standard() -> Self {
        Self {
            eps_values: vec![1e-1, 1e-2, 1e-3, 1e-4],
            t_end: 100.0,
            t_layer: None,
            integrator: IntegratorConfig {
                rel_tol: 1e-10,
                abs_tol: 1e-12,
                t_end: 100.0,
                max_steps: 1_000_000,
                method: crate::ode::Method::ImplicitStiff,
                sample_dt: 0.05,
            },
        }
    }
}

fn run(model: &Model, s0: &FullState, cfg: &IntegratorConfig) -> Result<Trajectory> {
    integrate(model, &s0.project(model.variant())?, cfg)
}

/// Integrates the finer level for each `eps` and the reduced level once, from
/// shared slow initial data, and records sup-norm distances.
pub fn eps_sweep(reduction: Reduction, base: &ModelParams, s0: &FullState, spec: &SweepSpec) -> Result<SweepResult> {
    if spec.eps_values.len() < 3 {
        return Err(Error::InvalidConfig("a sweep needs at least three eps values".into()));
    }
    if spec.eps_values.windows(2).any(|w| !(w[1] < w[0])) || spec.eps_values.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidConfig("eps values must be positive and strictly decreasing".into()));
    }
    if s0.x.len() != base.n() {
        return Err(Error::InvalidState(format!(
            "initial state has {} occupancies, parameters have n = {}",
            s0.x.len(),
            base.n()
        )));
    }
    let cfg = IntegratorConfig {
        t_end: spec.t_end,
        ..spec.integrator
    };
    let (finer, coarser) = reduction.levels();
    let reduced = run(&Model::new(coarser, base), s0, &cfg)?;

    let rows: Vec<(f64, Result<[f64; 4]>)> = spec
        .eps_values
        .par_iter()
        .map(|&eps| {
            let t_layer = spec.t_layer.unwrap_or(T_LAYER_FACTOR * eps);
            let outcome = (|| {
                let p = match reduction.varied() {
                    Epsilon::Eps1 => base.with_eps1(eps)?,
                    Epsilon::Eps2 => base.with_eps2(eps)?,
                };
                let fine = run(&Model::new(finer, &p), s0, &cfg)?;
                let mut d = [0.0f64; 4];
                for ((t, a), b) in fine.times.iter().zip(&fine.states).zip(&reduced.states) {
                    let (sa, fa) = split(&p, reduction, a.values(), false);
                    let (sb, fb) = split(&p, reduction, b.values(), true);
                    let (ds, df) = (max_dist(&sa, &sb), max_dist(&fa, &fb));
                    d[0] = d[0].max(ds);
                    d[2] = d[2].max(df);
                    if *t >= t_layer {
                        d[1] = d[1].max(ds);
                        d[3] = d[3].max(df);
                    }
                }
                Ok(d)
            })();
            (t_layer, outcome)
        })
        .collect();

    let mut out = SweepResult {
        reduction,
        varied: reduction.varied(),
        eps_values: spec.eps_values.clone(),
        t_layer: Vec::new(),
        slow_full: Vec::new(),
        slow_post_layer: Vec::new(),
        fast_full: Vec::new(),
        fast_post_layer: Vec::new(),
        sup_norm_post_layer: Vec::new(),
        failures: Vec::new(),
    };
    for (t_layer, outcome) in rows {
        let (d, failure) = match outcome {
            Ok(d) => (d, None),
            Err(e) => ([f64::NAN; 4], Some(e.to_string())),
        };
        out.t_layer.push(t_layer);
        out.slow_full.push(d[0]);
        out.slow_post_layer.push(d[1]);
        out.fast_full.push(d[2]);
        out.fast_post_layer.push(d[3]);
        out.sup_norm_post_layer.push(d[0].max(d[3]));
        out.failures.push(failure);
    }
    Ok(out)
}

impl SweepResult {
    /// Whether `values` never grows by more than `slack` (relative) between
    /// adjacent entries.
    pub fn non_increasing(values: &[f64], slack: f64) -> bool {
        values.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack))
    }

    /// CSV: one row per `eps` with every distance.
    pub fn to_csv_string(&self) -> String {
        use crate::numeric::fmt15;
        let mut s = String::from("eps,t_layer,slow_full,slow_post_layer,fast_full,fast_post_layer,sup_norm_post_layer,failure\n");
        for i in 0..self.eps_values.len() {
            let cols = [
                self.eps_values[i],
                self.t_layer[i],
                self.slow_full[i],
                self.slow_post_layer[i],
                self.fast_full[i],
                self.fast_post_layer[i],
                self.sup_norm_post_layer[i],
            ];
            let mut line: Vec<String> = cols.iter().map(|v| fmt15(*v)).collect();
            line.push(self.failures[i].clone().unwrap_or_default().replace(',', ";"));
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}
