//! Qualitative reproduction runs: every model level from a cold start, with
//! the oscillation class of `y1` compared to an expected table.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::ode::{detect_oscillation, integrate, IntegratorConfig, Method, OscillationClass, Trajectory};
use crate::params::ModelParams;
use crate::state::{StateVector, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig4,
    Fig5,
    Fig6a,
    Fig6b,
}

/// Expected oscillation class of one model level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Sustained,
    Damped,
    /// Damped or monotone.
    NotSustained,
    /// No claim.
    Any,
}

impl Expectation {
    pub fn admits(self, c: OscillationClass) -> bool {
        match self {
            Expectation::Sustained => c == OscillationClass::Sustained,
            Expectation::Damped => c == OscillationClass::Damped,
            Expectation::NotSustained => c != OscillationClass::Sustained,
            Expectation::Any => true,
        }
    }
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Expectation::Sustained => "sustained",
            Expectation::Damped => "damped",
            Expectation::NotSustained => "not-sustained",
            Expectation::Any => "any",
        })
    }
}

/// Transient share discarded before classification.
pub const FIGURE_TRANSIENT_FRACTION: f64 = 0.5;
pub const FIGURE_SAMPLE_DT: f64 = 0.5;

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig4, Figure::Fig5, Figure::Fig6a, Figure::Fig6b];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6a => "fig6a",
            Figure::Fig6b => "fig6b",
        }
    }

    /// Convergence needs a shorter horizon than three settled periods of
    /// an oscillation.
    pub fn t_end(self) -> f64 {
        match self {
            Figure::Fig4 => 500.0,
            _ => 2000.0,
        }
    }

    pub fn params(self) -> Result<ModelParams> {
        match self {
            Figure::Fig4 => config::preset_params("par-n3"),
            Figure::Fig5 => config::preset_params("par-n5"),
            Figure::Fig6a => config::preset_params("par-n9"),
            Figure::Fig6b => config::preset_params("par-n9")?.with_eps1(0.05),
        }
    }

    pub fn expected(self, v: Variant) -> Expectation {
        use Expectation::*;
        match (self, v) {
            (Figure::Fig4, _) => NotSustained,
            (Figure::Fig5, Variant::WithDimers) => Sustained,
            (Figure::Fig5, _) => NotSustained,
            (Figure::Fig6a, Variant::WithDimers) => Sustained,
            (Figure::Fig6a, Variant::Full) => Damped,
            (Figure::Fig6b, Variant::WithDimers | Variant::Full) => Sustained,
            (Figure::Fig6a | Figure::Fig6b, _) => Any,
        }
    }

    pub fn integrator(self) -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            t_end: self.t_end(),
            max_steps: 2_000_000,
            method: Method::ImplicitStiff,
            sample_dt: FIGURE_SAMPLE_DT,
        }
    }
}

impl std::fmt::Display for Figure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            Error::Config(format!("unknown figure '{s}' (expected fig4, fig5, fig6a or fig6b)"))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantVerdict {
    pub variant: Variant,
    pub class: OscillationClass,
    pub amplitude: f64,
    /// `null` when fewer than two maxima were found.
    pub period: Option<f64>,
    pub expected: Expectation,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureParameters {
    pub n: usize,
    pub k: Vec<f64>,
    pub gamma: Vec<f64>,
    pub kk: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub theta: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub r0: f64,
    pub t_end: f64,
    pub sample_dt: f64,
    pub transient_fraction: f64,
    pub initial_state: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureVerdicts {
    pub figure: Figure,
    pub parameters: FigureParameters,
    pub verdicts: Vec<VariantVerdict>,
    pub all_match: bool,
}

pub struct FigureRun {
    pub verdicts: FigureVerdicts,
    pub trajectories: Vec<Trajectory>,
}

/// Integrates all four levels from [`StateVector::cold_start`] and classifies
/// `y1` on the second half of the run.
pub fn run_figure(which: Figure) -> Result<FigureRun> {
    let p = which.params()?;
    let cfg = which.integrator();
    let runs: Vec<Result<(VariantVerdict, Trajectory)>> = Variant::ALL
        .par_iter()
        .map(|&v| {
            let model = Model::new(v, &p);
            let traj = integrate(&model, &StateVector::cold_start(v, p.n()), &cfg)?;
            let rep = detect_oscillation(&traj, FIGURE_TRANSIENT_FRACTION, v.y1_index(p.n()))?;
            let expected = which.expected(v);
            Ok((
                VariantVerdict {
                    variant: v,
                    class: rep.class,
                    amplitude: rep.amplitude,
                    period: rep.period.is_finite().then_some(rep.period),
                    expected,
                    matches: expected.admits(rep.class),
                },
                traj,
            ))
        })
        .collect();
    let mut verdicts = Vec::new();
    let mut trajectories = Vec::new();
    for r in runs {
        let (v, t) = r?;
        verdicts.push(v);
        trajectories.push(t);
    }
    let all_match = verdicts.iter().all(|v| v.matches);
    Ok(FigureRun {
        verdicts: FigureVerdicts {
            figure: which,
            parameters: FigureParameters {
                n: p.n(),
                k: p.k_binding().to_vec(),
                gamma: p.gamma().to_vec(),
                kk: p.kk(),
                delta1: p.delta1(),
                delta2: p.delta2(),
                theta: p.theta(),
                eps1: p.eps1(),
                eps2: p.eps2(),
                r0: p.r0(),
                t_end: cfg.t_end,
                sample_dt: cfg.sample_dt,
                transient_fraction: FIGURE_TRANSIENT_FRACTION,
                initial_state: "cold start: all sites free, y1 = y2 = z = 0".into(),
            },
            verdicts,
            all_match,
        },
        trajectories,
    })
}

impl FigureRun {
    /// Writes `{fig}_{variant}.csv` per level and `{fig}_verdicts.json`;
    /// returns the paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let fig = self.verdicts.figure.name();
        let mut paths = Vec::new();
        for t in &self.trajectories {
            let path = dir.join(format!("{fig}_{}.csv", t.variant));
            t.write_csv(std::fs::File::create(&path)?)?;
            paths.push(path);
        }
        let path = dir.join(format!("{fig}_verdicts.json"));
        let json = serde_json::to_string_pretty(&self.verdicts)
            .map_err(|e| Error::Config(format!("cannot serialize verdicts: {e}")))?;
        std::fs::write(&path, json + "\n")?;
        paths.push(path);
        Ok(paths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expectation_table() {
        assert_eq!(Figure::Fig5.expected(Variant::Full), Expectation::NotSustained);
        assert_eq!(Figure::Fig6a.expected(Variant::Full), Expectation::Damped);
        assert_eq!(Figure::Fig6b.expected(Variant::Classical), Expectation::Any);
        assert!(Expectation::NotSustained.admits(OscillationClass::Monotone));
        assert!(!Expectation::Damped.admits(OscillationClass::Monotone));
    }

    #[test]
    fn figure_parameters() {
        let p = Figure::Fig6b.params().unwrap();
        assert_eq!(p.n(), 9);
        assert_eq!(p.eps1(), 0.05);
        assert_eq!(Figure::Fig5.params().unwrap().n(), 5);
        assert_eq!("fig6a".parse::<Figure>().unwrap(), Figure::Fig6a);
        assert!("fig7".parse::<Figure>().is_err());
    }
}
