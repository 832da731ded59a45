//! Stability of the with-dimers reduction through the slope of the
//! repression function at the steady state.
//!
//! The Hurwitz condition `a1 a2 > a3` of that model's cubic is equivalent to
//! `-psi'(1) < T` with
//! `T = (eps2 (2k + delta1) + 1) (eps2 delta2 (2k + delta1 + delta2) + delta1 + delta2) / (2 eps2 r0 delta1 delta2)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, spectral_abscissa};
use crate::model::Model;
use crate::params::{BindingPolynomial, DimerParams};

use super::jacobian_fd;

/// Relative gap between the two sides below which no verdict is given.
pub const SLOPE_REL_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeClass {
    StableCertified,
    UnstableCertified,
    Indeterminate,
}

impl std::fmt::Display for SlopeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SlopeClass::StableCertified => "stable_certified",
            SlopeClass::UnstableCertified => "unstable_certified",
            SlopeClass::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeVerdict {
    pub class: SlopeClass,
    /// `-psi'(1)`.
    pub neg_psi_prime: f64,
    /// Threshold `T` the slope must stay below.
    pub threshold: f64,
    /// `T - (-psi'(1))`; positive means stable.
    pub margin: f64,
}

/// `-psi'(1)`.
pub fn neg_psi_prime(poly: &BindingPolynomial) -> f64 {
    -poly.psi_prime(1.0)
}

/// Largest slope compatible with a stable steady state.
pub fn slope_threshold(d: &DimerParams) -> f64 {
    let a = 2.0 * d.kk + d.delta1;
    (d.eps2 * a + 1.0) * (d.eps2 * d.delta2 * (a + d.delta2) + d.delta1 + d.delta2)
        / (2.0 * d.eps2 * d.r0() * d.delta1 * d.delta2)
}

/// Compares `-psi'(1)` with the threshold; certified in either direction
/// unless the two agree to [`SLOPE_REL_BAND`].
pub fn slope_criterion(d: &DimerParams) -> SlopeVerdict {
    let lhs = neg_psi_prime(&d.poly);
    let rhs = slope_threshold(d);
    let margin = rhs - lhs;
    let class = if margin.abs() <= SLOPE_REL_BAND * lhs.abs().max(rhs.abs()) {
        SlopeClass::Indeterminate
    } else if margin > 0.0 {
        SlopeClass::StableCertified
    } else {
        SlopeClass::UnstableCertified
    };
    SlopeVerdict {
        class,
        neg_psi_prime: lhs,
        threshold: rhs,
        margin,
    }
}

/// Upper bound `n (r0 - 1) / r0^2` on `-psi'(1)`, attained by `q(y) = a y^n`.
pub fn psi_prime_bound(poly: &BindingPolynomial) -> f64 {
    let r0 = poly.r0();
    poly.degree() as f64 * (r0 - 1.0) / (r0 * r0)
}

/// Smallest `r0` for which the Hill-form model with `eps2 = delta1 = delta2 = 1`
/// and `k = 0` is unstable: `n / (n - 4)`.
pub fn min_unstable_r0(n: usize) -> Result<f64> {
    if n <= 4 {
        return Err(Error::Unsupported(format!(
            "no instability possible with n = {n} <= 4 binding sites"
        )));
    }
    Ok(n as f64 / (n as f64 - 4.0))
}

/// One axis of a parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanAxis {
    pub name: String,
    pub values: Vec<f64>,
}

impl ScanAxis {
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(name: &str, start: f64, stop: f64, count: usize) -> Result<Self> {
        if count == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(Error::InvalidConfig(format!("bad grid for {name}")));
        }
        let values = if count == 1 {
            vec![start]
        } else {
            (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect()
        };
        Ok(Self {
            name: name.to_string(),
            values,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    /// One value per axis, in axis order.
    pub coords: Vec<f64>,
    pub verdict: SlopeVerdict,
    /// Spectral abscissa of the finite-difference Jacobian at `(1, 1, 1)`.
    pub max_real_eig: f64,
}

/// Evaluates the slope criterion and the Jacobian spectrum over the
/// Cartesian product of `axes`, first axis slowest. `build` maps a grid point
/// to model parameters.
pub fn scan<F>(axes: &[ScanAxis], build: F) -> Result<Vec<ScanPoint>>
where
    F: Fn(&[f64]) -> Result<DimerParams> + Sync,
{
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut coords = vec![0.0; axes.len()];
            for (c, axis) in coords.iter_mut().zip(axes).rev() {
                *c = axis.values[idx % axis.values.len()];
                idx /= axis.values.len();
            }
            let d = build(&coords)?;
            let verdict = slope_criterion(&d);
            let model = Model::WithDimers(d);
            let ss = model.steady_state()?;
            let eig = eigenvalues(&jacobian_fd(&model, &ss)?)?;
            Ok(ScanPoint {
                coords,
                verdict,
                max_real_eig: spectral_abscissa(&eig),
            })
        })
        .collect()
}

/// CSV with one column per axis, then `neg_psi_prime`, `slope_threshold`,
/// `verdict` and `max_real_eig`.
pub fn write_scan_csv<W: std::io::Write>(axes: &[ScanAxis], points: &[ScanPoint], mut w: W) -> Result<()> {
    use crate::numeric::fmt15;
    let names: Vec<&str> = axes.iter().map(|a| a.name.as_str()).collect();
    writeln!(w, "{},neg_psi_prime,slope_threshold,verdict,max_real_eig", names.join(","))?;
    for p in points {
        let mut cols: Vec<String> = p.coords.iter().map(|v| fmt15(*v)).collect();
        cols.push(fmt15(p.verdict.neg_psi_prime));
        cols.push(fmt15(p.verdict.threshold));
        cols.push(p.verdict.class.to_string());
        cols.push(fmt15(p.max_real_eig));
        writeln!(w, "{}", cols.join(","))?;
    }
    Ok(())
}
