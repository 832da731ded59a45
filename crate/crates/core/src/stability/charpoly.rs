//! Characteristic polynomials at the positive steady state and the
//! Routh-Hurwitz test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DimerParams, ModelParams};

/// Relative cancellation below which a Hurwitz quantity `P - N` counts as zero.
pub const HURWITZ_REL_BAND: f64 = 1e-12;

/// Monic polynomial, coefficients from the highest degree down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    coeffs: Vec<f64>,
}

impl CharPoly {
    /// `coeffs[0]` must be exactly 1.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.first() != Some(&1.0) {
            return Err(Error::InvalidParams("characteristic polynomial must be monic".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams("characteristic polynomial has non-finite coefficients".into()));
        }
        Ok(Self { coeffs })
    }

    /// `lambda^d + a_1 lambda^{d-1} + ... + a_d` from `a_1..a_d`.
    pub fn from_tail(tail: &[f64]) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(tail.len() + 1);
        coeffs.push(1.0);
        coeffs.extend_from_slice(tail);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `a_i`, with `a_0 = 1`.
    pub fn a(&self, i: usize) -> f64 {
        self.coeffs[i]
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc * x + c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HurwitzVerdict {
    Stable,
    Unstable,
    Marginal,
}

impl std::fmt::Display for HurwitzVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HurwitzVerdict::Stable => "stable",
            HurwitzVerdict::Unstable => "unstable",
            HurwitzVerdict::Marginal => "marginal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Positive,
    Negative,
    Zero,
}

/// Sign of `pos - neg` for non-negative parts, zero under relative cancellation.
fn sign_of_difference(pos: f64, neg: f64) -> Sign {
    let d = pos - neg;
    if d.abs() <= HURWITZ_REL_BAND * pos.abs().max(neg.abs()) {
        Sign::Zero
    } else if d > 0.0 {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

fn split(x: f64) -> (f64, f64) {
    if x >= 0.0 {
        (x, 0.0)
    } else {
        (0.0, -x)
    }
}

/// Hurwitz conditions for degrees 2 to 4: every coefficient positive, plus
/// `a1 a2 > a3` (degree 3) or `a3 (a1 a2 - a3) > a1^2 a4` (degree 4).
///
/// Each quantity is compared as a difference of non-negative parts; it is
/// marginal when the parts agree to [`HURWITZ_REL_BAND`]. A strictly failed
/// condition takes precedence over a marginal one.
pub fn routh_hurwitz(cp: &CharPoly) -> Result<HurwitzVerdict> {
    let d = cp.degree();
    if !(2..=4).contains(&d) {
        return Err(Error::Unsupported(format!(
            "Routh-Hurwitz test implemented for degrees 2 to 4, got {d}"
        )));
    }
    let a = |i: usize| cp.a(i);
    let mut signs: Vec<Sign> = (1..=d).map(|i| {
        let (p, n) = split(a(i));
        sign_of_difference(p, n)
    }).collect();
    let all_coeffs_positive = signs.iter().all(|s| *s == Sign::Positive);
    if all_coeffs_positive {
        match d {
            3 => signs.push(sign_of_difference(a(1) * a(2), a(3))),
            4 => signs.push(sign_of_difference(
                a(1) * a(2) * a(3),
                a(3) * a(3) + a(1) * a(1) * a(4),
            )),
            _ => {}
        }
    }
    Ok(if signs.contains(&Sign::Negative) {
        HurwitzVerdict::Unstable
    } else if signs.contains(&Sign::Zero) {
        HurwitzVerdict::Marginal
    } else {
        HurwitzVerdict::Stable
    })
}

fn require_single_site(p: &ModelParams) -> Result<()> {
    if p.n() == 1 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "closed-form characteristic polynomial needs n = 1, got n = {}",
            p.n()
        )))
    }
}

/// Quartic of the full model with one site, in time rescaled by `eps2`:
/// its roots are the eigenvalues of `eps2 J`.
pub fn charpoly_full_n1(p: &ModelParams) -> Result<CharPoly> {
    require_single_site(p)?;
    let g1 = p.gamma()[0];
    let (k, d1, d2, th, e2) = (p.kk(), p.delta1(), p.delta2(), p.theta(), p.eps2());
    let eps = e2 / p.eps1();
    let x0 = g1 / (1.0 + g1);
    let c0 = eps * e2 * d1 * (g1 + 1.0);
    let c1 = eps * (g1 + 1.0) * (e2 * (2.0 * k + d1) + 1.0) + e2 * (2.0 * k * th * x0 + d1 * (1.0 + th * x0));
    let c2 = eps * (g1 + 1.0) + e2 * (2.0 * k + d1) + th * x0 + 1.0;
    let a1 = e2 * d2 + c2;
    let a2 = e2 * d2 * c2 + c1;
    let a3 = e2 * d2 * c1 + c0;
    let a4 = eps * e2 * e2 * d1 * d2 * (g1 + 3.0);
    CharPoly::from_tail(&[a1, a2, a3, a4])
}

/// Cubic of the no-dimers model with one site.
pub fn charpoly_nodimers_n1(p: &ModelParams) -> Result<CharPoly> {
    require_single_site(p)?;
    let g1 = p.gamma()[0];
    let (k, d1, d2, th, e1) = (p.kk(), p.delta1(), p.delta2(), p.theta(), p.eps1());
    let eta = (1.0 + g1) / (1.0 + g1 * (1.0 + th));
    let bound = g1 / (1.0 + g1);
    let a1 = d1 + d2 + eta * (1.0 + g1) / e1 + 2.0 * k * eta * th * bound;
    let a2 = eta * (d1 + d2) * (1.0 + g1) / e1 + 2.0 * k * eta * th * d2 * bound + d1 * d2;
    let a3 = eta * d1 * d2 * (3.0 + g1) / e1;
    CharPoly::from_tail(&[a1, a2, a3])
}

/// Cubic of the with-dimers model, any number of sites.
pub fn charpoly_withdimers(d: &DimerParams) -> CharPoly {
    let a = 2.0 * d.kk + d.delta1;
    let inv = 1.0 / d.eps2;
    let slope = d.poly.psi_prime(1.0);
    CharPoly::from_tail(&[
        a + d.delta2 + inv,
        d.delta1 * inv + d.delta2 * (a + inv),
        d.delta1 * d.delta2 * inv * (1.0 - 2.0 * d.r0() * slope),
    ])
    .expect("coefficients are finite for valid parameters")
}

/// Quadratic of the classical two-variable model.
pub fn charpoly_classical(d: &DimerParams) -> CharPoly {
    let slope = d.poly.psi_prime(1.0);
    CharPoly::from_tail(&[d.delta1 + d.delta2, d.delta1 * d.delta2 * (1.0 - 2.0 * d.r0() * slope)])
        .expect("coefficients are finite for valid parameters")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(tail: &[f64]) -> CharPoly {
        CharPoly::from_tail(tail).unwrap()
    }

    #[test]
    fn textbook_cases() {
        assert_eq!(routh_hurwitz(&poly(&[2.0, 1.0])).unwrap(), HurwitzVerdict::Stable);
        assert_eq!(routh_hurwitz(&poly(&[1.0, 1.0, 2.0])).unwrap(), HurwitzVerdict::Unstable);
        assert_eq!(routh_hurwitz(&poly(&[1.0, 1.0, 1.0])).unwrap(), HurwitzVerdict::Marginal);
        assert_eq!(routh_hurwitz(&poly(&[0.0, 1.0])).unwrap(), HurwitzVerdict::Marginal);
        assert_eq!(routh_hurwitz(&poly(&[-1.0, 0.0])).unwrap(), HurwitzVerdict::Unstable);
        // (l + 1)^4
        assert_eq!(routh_hurwitz(&poly(&[4.0, 6.0, 4.0, 1.0])).unwrap(), HurwitzVerdict::Stable);
        // (l^2 + 1)(l + 1)^2 has a conjugate pair on the axis.
        assert_eq!(routh_hurwitz(&poly(&[2.0, 2.0, 2.0, 1.0])).unwrap(), HurwitzVerdict::Marginal);
        assert!(routh_hurwitz(&poly(&[1.0])).is_err());
        assert!(routh_hurwitz(&poly(&[1.0; 5])).is_err());
    }

    #[test]
    fn small_coefficients_are_not_marginal() {
        // Roots -1e-7, -1e-8, -1e-9: tiny but well separated from zero.
        let (r1, r2, r3): (f64, f64, f64) = (1e-7, 1e-8, 1e-9);
        let cp = poly(&[r1 + r2 + r3, r1 * r2 + r1 * r3 + r2 * r3, r1 * r2 * r3]);
        assert_eq!(routh_hurwitz(&cp).unwrap(), HurwitzVerdict::Stable);
    }

    #[test]
    fn monic_required() {
        assert!(CharPoly::new(vec![2.0, 1.0]).is_err());
        assert!(CharPoly::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn nodimers_constant_term_hand_value() {
        let p = ModelParams::new(1, vec![1.0], vec![1.0], 0.3, 1.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        let cp = charpoly_nodimers_n1(&p).unwrap();
        assert!((cp.a(3) - 3.2).abs() < 1e-14);
    }

    #[test]
    fn full_constant_term_closed_form() {
        let p = ModelParams::new(1, vec![1.0], vec![2.5], 0.3, 0.7, 1.9, 0.5, 0.2, 3.0).unwrap();
        let cp = charpoly_full_n1(&p).unwrap();
        let eps = 3.0 / 0.2;
        assert!((cp.a(4) - eps * 9.0 * 0.7 * 1.9 * 5.5).abs() < 1e-10 * cp.a(4));
        assert!(charpoly_full_n1(&p.with_eps1(1.0).unwrap()).is_ok());
        let p2 = ModelParams::new(2, vec![1.0, 1.0], vec![1.0, 1.0], 0.3, 0.7, 1.9, 0.5, 0.2, 3.0).unwrap();
        assert!(charpoly_full_n1(&p2).is_err());
    }
}
