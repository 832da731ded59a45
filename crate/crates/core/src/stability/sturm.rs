//! The binding chain's generator matrix and its Sturm sequence.
//!
//! The leading-minor recurrence at `lambda = 0` is evaluated in exact rational
//! arithmetic. In floating point the forward recurrence tracks a subdominant
//! solution there and loses all relative accuracy for moderately stiff rates.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Tridiagonal generator of the binding chain on `x_0..x_n`.
///
/// `subdiag[j] = k_j y2` is the binding rate from `j` to `j + 1` occupied
/// sites; `superdiag[j] = (j + 1) gamma_{j+1}` is the unbinding rate from
/// `j + 1` to `j`. The diagonal makes every column sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BindingMatrix {
    subdiag: Vec<f64>,
    superdiag: Vec<f64>,
}

impl BindingMatrix {
    /// Builds from off-diagonal rates; `subdiag >= 0`, `superdiag > 0`.
    pub fn from_rates(subdiag: Vec<f64>, superdiag: Vec<f64>) -> Result<Self> {
        if subdiag.len() != superdiag.len() {
            return Err(Error::InvalidParams("off-diagonals differ in length".into()));
        }
        if subdiag.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParams("binding rates must be finite and >= 0".into()));
        }
        if superdiag.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidParams("unbinding rates must be finite and > 0".into()));
        }
        Ok(Self { subdiag, superdiag })
    }

    /// Matrix dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.subdiag.len() + 1
    }

    pub fn subdiag(&self) -> &[f64] {
        &self.subdiag
    }

    pub fn superdiag(&self) -> &[f64] {
        &self.superdiag
    }

    pub fn diag(&self) -> Vec<f64> {
        let m = self.subdiag.len();
        (0..=m)
            .map(|j| {
                let out = if j < m { self.subdiag[j] } else { 0.0 };
                let back = if j > 0 { self.superdiag[j - 1] } else { 0.0 };
                -(out + back)
            })
            .collect()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let d = self.dim();
        let mut m = nalgebra::DMatrix::zeros(d, d);
        for (j, v) in self.diag().into_iter().enumerate() {
            m[(j, j)] = v;
        }
        for j in 0..d - 1 {
            m[(j + 1, j)] = self.subdiag[j];
            m[(j, j + 1)] = self.superdiag[j];
        }
        m
    }

    /// Diagonal and off-diagonal of the similar symmetric matrix, with
    /// off-diagonal entries `sqrt(subdiag_j superdiag_j)`.
    pub fn symmetric_form(&self) -> (Vec<f64>, Vec<f64>) {
        let off = self
            .subdiag
            .iter()
            .zip(&self.superdiag)
            .map(|(a, b)| (a * b).sqrt())
            .collect();
        (self.diag(), off)
    }

    fn exact_parts(&self) -> Result<(Vec<BigRational>, Vec<BigRational>)> {
        let q = |v: f64| {
            BigRational::from_float(v).ok_or_else(|| Error::InvalidParams(format!("non-finite rate {v}")))
        };
        let sub = self.subdiag.iter().map(|v| q(*v)).collect::<Result<Vec<_>>>()?;
        let sup = self.superdiag.iter().map(|v| q(*v)).collect::<Result<Vec<_>>>()?;
        let m = sub.len();
        let diag = (0..=m)
            .map(|j| {
                let mut s = BigRational::zero();
                if j < m {
                    s += &sub[j];
                }
                if j > 0 {
                    s += &sup[j - 1];
                }
                -s
            })
            .collect();
        let beta_sq = sub.iter().zip(&sup).map(|(a, b)| a * b).collect();
        Ok((diag, beta_sq))
    }

    fn exact_sequence(&self, lambda: f64) -> Result<Vec<BigRational>> {
        let lam = BigRational::from_float(lambda)
            .ok_or_else(|| Error::InvalidParams(format!("shift must be finite, got {lambda}")))?;
        let (diag, beta_sq) = self.exact_parts()?;
        let mut seq = Vec::with_capacity(diag.len() + 1);
        seq.push(BigRational::one());
        seq.push(&diag[0] - &lam);
        for j in 2..=diag.len() {
            let next = (&diag[j - 1] - &lam) * &seq[j - 1] - &beta_sq[j - 2] * &seq[j - 2];
            seq.push(next);
        }
        Ok(seq)
    }
}

/// Generator at dimer level `y2` for the model's rates.
pub fn binding_matrix(p: &ModelParams, y2: f64) -> Result<BindingMatrix> {
    if !(y2.is_finite() && y2 >= 0.0) {
        return Err(Error::InvalidState(format!("y2 must be finite and >= 0, got {y2}")));
    }
    let sub = p.k_binding().iter().map(|k| k * y2).collect();
    let sup = p
        .gamma()
        .iter()
        .enumerate()
        .map(|(i, g)| (i + 1) as f64 * g)
        .collect();
    BindingMatrix::from_rates(sub, sup)
}

/// Leading principal minors `Delta_0..Delta_{n+1}` of `A - lambda I`.
pub fn sturm_sequence(m: &BindingMatrix, lambda: f64) -> Result<Vec<f64>> {
    Ok(m.exact_sequence(lambda)?
        .iter()
        .map(|v| v.to_f64().unwrap_or(f64::NAN))
        .collect())
}

/// Number of eigenvalues strictly greater than `a`: sign agreements between
/// consecutive Sturm members, an exact zero taking the sign opposite to its
/// predecessor.
pub fn count_eigs_above(m: &BindingMatrix, a: f64) -> Result<usize> {
    let seq = m.exact_sequence(a)?;
    let mut count = 0;
    let mut prev_positive = true;
    for v in &seq[1..] {
        let positive = if v.is_zero() { !prev_positive } else { v.is_positive() };
        if positive == prev_positive {
            count += 1;
        }
        prev_positive = positive;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_n1() -> ModelParams {
        ModelParams::new(1, vec![1.0], vec![1.0], 0.1, 1.0, 1.0, 0.5, 1.0, 1.0).unwrap()
    }

    #[test]
    fn single_site_matrix() {
        let m = binding_matrix(&unit_n1(), 1.0).unwrap();
        let d = m.to_dense();
        assert_eq!(d.as_slice(), &[-1.0, 1.0, 1.0, -1.0]);
        assert_eq!(count_eigs_above(&m, 0.0).unwrap(), 0);
        assert_eq!(count_eigs_above(&m, -1.0).unwrap(), 1);
        assert_eq!(count_eigs_above(&m, -2.5).unwrap(), 2);
    }

    #[test]
    fn sequence_at_zero() {
        let p = ModelParams::new(2, vec![1.0, 3.0], vec![0.5, 2.0], 0.1, 1.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        let m = binding_matrix(&p, 1.0).unwrap();
        let s = sturm_sequence(&m, 0.0).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s[0], 1.0);
        assert_eq!(s[1], -1.0);
        assert_eq!(s[2], 3.0);
        assert_eq!(s[3], 0.0);
    }

    #[test]
    fn rejects_negative_binding_rate() {
        assert!(BindingMatrix::from_rates(vec![-1.0], vec![1.0]).is_err());
        assert!(BindingMatrix::from_rates(vec![1.0], vec![0.0]).is_err());
        assert!(binding_matrix(&unit_n1(), -1.0).is_err());
    }

    #[test]
    fn columns_sum_to_zero() {
        let p = ModelParams::new(3, vec![1.0, 0.3, 7.0], vec![2.0, 0.1, 4.0], 0.1, 1.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        let d = binding_matrix(&p, 2.5).unwrap().to_dense();
        for c in 0..4 {
            assert!(d.column(c).sum().abs() < 1e-14);
        }
    }
}
