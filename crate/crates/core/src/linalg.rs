//! Dense helpers: finite-difference Jacobians and balanced eigenvalues.

use nalgebra::linalg::balancing::balance_parlett_reinsch;
use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Central-difference Jacobian of `f` at `y` with column step
/// `max(1e-7, 1e-7 |y_i|)`.
pub fn central_jacobian<F>(f: F, y: &[f64]) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = y.len();
    let mut jac = DMatrix::zeros(n, n);
    let mut yp = y.to_vec();
    let mut fp = vec![0.0; n];
    let mut fm = vec![0.0; n];
    for c in 0..n {
        let h = (1e-7 * y[c].abs()).max(1e-7);
        let (up, down) = (y[c] + h, y[c] - h);
        yp[c] = up;
        f(&yp, &mut fp);
        yp[c] = down;
        f(&yp, &mut fm);
        yp[c] = y[c];
        // Divide by the representable step, not the nominal one.
        let span = up - down;
        for r in 0..n {
            jac[(r, c)] = (fp[r] - fm[r]) / span;
        }
    }
    if jac.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidState("finite-difference Jacobian has non-finite entries".into()));
    }
    Ok(jac)
}

/// Forward-difference Jacobian for implicit steps; `f0 = f(y)` is reused.
pub(crate) fn forward_jacobian<F>(f: F, y: &[f64], f0: &[f64], jac: &mut DMatrix<f64>)
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = y.len();
    let mut yp = y.to_vec();
    let mut fp = vec![0.0; n];
    for c in 0..n {
        let h = f64::EPSILON.sqrt() * y[c].abs().max(1e-5);
        yp[c] = y[c] + h;
        f(&yp, &mut fp);
        yp[c] = y[c];
        for r in 0..n {
            jac[(r, c)] = (fp[r] - f0[r]) / h;
        }
    }
}

/// Eigenvalues of a real square matrix after Parlett-Reinsch balancing.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidState("matrix has non-finite entries".into()));
    }
    let mut b = m.clone();
    balance_parlett_reinsch(&mut b);
    // The QR iteration has no exceptional shifts and can cycle; a similar or
    // transposed matrix usually breaks the cycle.
    let schur = b
        .try_schur(f64::EPSILON, 10_000)
        .or_else(|| m.clone().try_schur(f64::EPSILON, 10_000))
        .or_else(|| m.transpose().try_schur(f64::EPSILON, 10_000))
        .ok_or_else(|| Error::Unsupported("Schur decomposition did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Largest real part among the eigenvalues.
pub fn spectral_abscissa(eigs: &[Complex<f64>]) -> f64 {
    eigs.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re))
}
