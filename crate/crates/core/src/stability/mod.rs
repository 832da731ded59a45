//! Linear stability of the positive steady state.

mod charpoly;
mod dimers;
mod sturm;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{central_jacobian, eigenvalues, spectral_abscissa};
use crate::model::Model;
use crate::numeric::fmt15;
use crate::state::{StateVector, Variant};

pub use charpoly::{
    charpoly_classical, charpoly_full_n1, charpoly_nodimers_n1, charpoly_withdimers, routh_hurwitz, CharPoly,
    HurwitzVerdict, HURWITZ_REL_BAND,
};
pub use dimers::{
    min_unstable_r0, neg_psi_prime, psi_prime_bound, scan, slope_criterion, slope_threshold, write_scan_csv,
    ScanAxis, ScanPoint, SlopeClass, SlopeVerdict, SLOPE_REL_BAND,
};
pub use sturm::{binding_matrix, count_eigs_above, sturm_sequence, BindingMatrix};

/// Real parts within this distance of zero give a marginal verdict.
pub const EIG_MARGINAL_BAND: f64 = 1e-9;

/// Central-difference Jacobian of a model's right-hand side at `s`.
pub fn jacobian_fd(model: &Model, s: &StateVector) -> Result<DMatrix<f64>> {
    if s.variant() != model.variant() {
        return Err(Error::InvalidState(format!(
            "{} state passed to the {} model",
            s.variant(),
            model.variant()
        )));
    }
    s.validate(model.n())?;
    central_jacobian(|y, out| model.eval(y, out), s.values())
}

/// Stable when every real part is below `-EIG_MARGINAL_BAND`, unstable when
/// one exceeds `EIG_MARGINAL_BAND`, marginal otherwise.
pub fn eigen_verdict(eigs: &[Complex<f64>]) -> HurwitzVerdict {
    let top = spectral_abscissa(eigs);
    if top < -EIG_MARGINAL_BAND {
        HurwitzVerdict::Stable
    } else if top > EIG_MARGINAL_BAND {
        HurwitzVerdict::Unstable
    } else {
        HurwitzVerdict::Marginal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub variant: Variant,
    pub steady_state: Vec<f64>,
    pub jacobian_eigenvalues: Vec<Eigenvalue>,
    pub max_real_part: f64,
    /// Verdict from the eigenvalues of the finite-difference Jacobian.
    pub verdict: HurwitzVerdict,
    /// Closed-form characteristic polynomial, where one is available.
    pub char_poly: Option<CharPoly>,
    /// Routh-Hurwitz verdict on `char_poly`.
    pub hurwitz_verdict: Option<HurwitzVerdict>,
    /// Slope criterion, with-dimers model only.
    pub slope: Option<SlopeVerdict>,
    pub notes: Vec<String>,
}

/// Analyses the steady state of one model level.
pub fn stability_report(model: &Model) -> Result<StabilityReport> {
    let ss = model.steady_state()?;
    let jac = jacobian_fd(model, &ss)?;
    let mut eigs = eigenvalues(&jac)?;
    eigs.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let mut notes = Vec::new();
    let char_poly = match model {
        Model::Full(p) if p.n() == 1 => {
            notes.push("characteristic polynomial in time rescaled by eps2".into());
            Some(charpoly_full_n1(p)?)
        }
        Model::NoDimers(p) if p.n() == 1 => Some(charpoly_nodimers_n1(p)?),
        Model::WithDimers(d) => Some(charpoly_withdimers(d)),
        Model::Classical(d) => Some(charpoly_classical(d)),
        _ => {
            notes.push("no closed-form characteristic polynomial for n > 1; verdict from eigenvalues only".into());
            None
        }
    };
    let hurwitz_verdict = char_poly.as_ref().map(routh_hurwitz).transpose()?;
    let slope = match model {
        Model::WithDimers(d) => Some(slope_criterion(d)),
        _ => None,
    };
    let verdict = eigen_verdict(&eigs);
    if let Some(h) = hurwitz_verdict {
        if h != verdict && h != HurwitzVerdict::Marginal && verdict != HurwitzVerdict::Marginal {
            notes.push(format!("Routh-Hurwitz verdict {h} disagrees with eigenvalue verdict {verdict}"));
        }
    }
    Ok(StabilityReport {
        variant: model.variant(),
        steady_state: ss.into_values(),
        max_real_part: spectral_abscissa(&eigs),
        jacobian_eigenvalues: eigs.iter().map(|z| Eigenvalue { re: z.re, im: z.im }).collect(),
        verdict,
        char_poly,
        hurwitz_verdict,
        slope,
        notes,
    })
}

impl StabilityReport {
    /// `key = value` lines, numbers with 15 significant digits.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        let list = |xs: &[f64]| xs.iter().map(|v| fmt15(*v)).collect::<Vec<_>>().join(", ");
        line("variant", self.variant.to_string());
        line("steady_state", format!("[{}]", list(&self.steady_state)));
        line(
            "eigenvalues",
            format!(
                "[{}]",
                self.jacobian_eigenvalues
                    .iter()
                    .map(|e| format!("{}{}{}i", fmt15(e.re), if e.im < 0.0 { "-" } else { "+" }, fmt15(e.im.abs())))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        );
        line("max_real_part", fmt15(self.max_real_part));
        line("verdict", self.verdict.to_string());
        if let Some(cp) = &self.char_poly {
            line("char_poly", format!("[{}]", list(cp.coeffs())));
        }
        if let Some(h) = self.hurwitz_verdict {
            line("hurwitz_verdict", h.to_string());
        }
        if let Some(s) = &self.slope {
            line("slope_verdict", s.class.to_string());
            line("neg_psi_prime", fmt15(s.neg_psi_prime));
            line("slope_threshold", fmt15(s.threshold));
            line("slope_margin", fmt15(s.margin));
        }
        for n in &self.notes {
            line("note", n.clone());
        }
        out
    }
}
