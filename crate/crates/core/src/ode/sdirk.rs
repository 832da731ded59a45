use nalgebra::{DMatrix, DVector};

use super::{err_norm, IntegratorConfig, OdeSystem, StepOutcome, Stepper};
use crate::linalg::forward_jacobian;

const GAMMA: f64 = 0.25;
const STAGES: usize = 5;

const C: [f64; STAGES] = [0.25, 0.75, 11.0 / 20.0, 0.5, 1.0];

const A: [[f64; STAGES]; STAGES] = [
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [0.5, 0.25, 0.0, 0.0, 0.0],
    [17.0 / 50.0, -1.0 / 25.0, 0.25, 0.0, 0.0],
    [371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.25, 0.0],
    [25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25],
];

/// Embedded third-order weights. The fourth-order weights are the last row
/// of `A`, so the new state is the last stage value.
const B_HAT: [f64; STAGES] = [59.0 / 48.0, -17.0 / 96.0, 225.0 / 32.0, -85.0 / 12.0, 0.0];

const NEWTON_MAX_ITER: usize = 10;
/// Newton stopping level in units of the error tolerance.
const NEWTON_KAPPA: f64 = 0.03;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Five-stage stiffly accurate SDIRK of order 4, simplified Newton with one
/// LU of `I - h gamma J` per step.
pub(crate) struct Sdirk4 {
    jac: DMatrix<f64>,
    jac_t: Option<f64>,
    stage_f: [Vec<f64>; STAGES],
    z: Vec<f64>,
    base: Vec<f64>,
    trial: Vec<f64>,
    ftrial: Vec<f64>,
    scale: Vec<f64>,
}

impl Sdirk4 {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            jac: DMatrix::zeros(dim, dim),
            jac_t: None,
            stage_f: std::array::from_fn(|_| vec![0.0; dim]),
            z: vec![0.0; dim],
            base: vec![0.0; dim],
            trial: vec![0.0; dim],
            ftrial: vec![0.0; dim],
            scale: vec![0.0; dim],
        }
    }

    fn scaled_norm(&self, v: &DVector<f64>) -> f64 {
        let n = v.len().max(1) as f64;
        (v.iter().zip(&self.scale).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / n).sqrt()
    }
}

impl Stepper for Sdirk4 {
    const ORDER: i32 = 4;

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
    ) -> StepOutcome {
        let dim = y.len();
        if self.jac_t != Some(t) {
            if !sys.jacobian(t, y, &mut self.jac) {
                forward_jacobian(|yy, out| sys.rhs(t, yy, out), y, f, &mut self.jac);
            }
            self.jac_t = Some(t);
        }
        let mut m = DMatrix::<f64>::identity(dim, dim);
        m -= &self.jac * (h * GAMMA);
        let lu = m.lu();
        for (s, yi) in self.scale.iter_mut().zip(y) {
            *s = cfg.abs_tol + cfg.rel_tol * yi.abs();
        }

        for i in 0..STAGES {
            // base = h * sum_{j<i} a_ij F_j
            for k in 0..dim {
                self.base[k] = h * (0..i).map(|j| A[i][j] * self.stage_f[j][k]).sum::<f64>();
                self.z[k] = self.base[k] + h * GAMMA * f[k];
            }
            let mut prev_norm = f64::INFINITY;
            let mut converged = false;
            for iter in 0..NEWTON_MAX_ITER {
                for k in 0..dim {
                    self.trial[k] = y[k] + self.z[k];
                }
                sys.rhs(t + C[i] * h, &self.trial, &mut self.ftrial);
                let resid = DVector::from_iterator(
                    dim,
                    (0..dim).map(|k| self.base[k] + h * GAMMA * self.ftrial[k] - self.z[k]),
                );
                let Some(delta) = lu.solve(&resid) else {
                    return StepOutcome::Failed;
                };
                let norm = self.scaled_norm(&delta);
                if !norm.is_finite() {
                    return StepOutcome::Failed;
                }
                for k in 0..dim {
                    self.z[k] += delta[k];
                }
                if iter > 0 {
                    let theta = norm / prev_norm;
                    if theta >= 1.0 {
                        return StepOutcome::Failed;
                    }
                    if theta / (1.0 - theta) * norm <= NEWTON_KAPPA {
                        converged = true;
                        break;
                    }
                } else if norm <= 1e-3 * NEWTON_KAPPA {
                    converged = true;
                    break;
                }
                prev_norm = norm;
            }
            if !converged {
                return StepOutcome::Failed;
            }
            // Stage derivative recovered from the stage equation, not re-evaluated.
            for k in 0..dim {
                self.stage_f[i][k] = (self.z[k] - self.base[k]) / (h * GAMMA);
            }
        }

        for k in 0..dim {
            y_new[k] = y[k] + self.z[k];
        }
        let raw = DVector::from_iterator(
            dim,
            (0..dim).map(|k| h * (0..STAGES).map(|i| (A[4][i] - B_HAT[i]) * self.stage_f[i][k]).sum::<f64>()),
        );
        // Filtering through (I - h gamma J)^-1 keeps the estimate bounded for stiff modes.
        let filtered = lu.solve(&raw).unwrap_or(raw);
        let err = err_norm(filtered.as_slice(), y, y_new, cfg.rel_tol, cfg.abs_tol);
        if !err.is_finite() {
            *h_next = h * FAC_MIN;
            return StepOutcome::Rejected { err };
        }
        let fac = if err == 0.0 { FAC_MAX } else { SAFETY * err.powf(-0.25) };
        if err <= 1.0 {
            *h_next = h * fac.clamp(FAC_MIN, FAC_MAX);
            sys.rhs(t + h, y_new, f_new);
            StepOutcome::Accepted
        } else {
            *h_next = h * fac.clamp(FAC_MIN, 1.0);
            StepOutcome::Rejected { err }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    fn a_times(v: &[f64]) -> Vec<f64> {
        (0..STAGES).map(|i| dot(&A[i], v)).collect()
    }

    #[test]
    fn order_conditions() {
        for i in 0..STAGES {
            assert!((A[i].iter().sum::<f64>() - C[i]).abs() < 1e-15);
            assert_eq!(A[i][i], GAMMA);
        }
        let b = &A[4];
        let c2: Vec<f64> = C.iter().map(|c| c * c).collect();
        let c3: Vec<f64> = C.iter().map(|c| c * c * c).collect();
        let ac = a_times(&C);
        let cac: Vec<f64> = C.iter().zip(&ac).map(|(c, a)| c * a).collect();
        let checks = [
            (b.iter().sum::<f64>(), 1.0),
            (dot(b, &C), 0.5),
            (dot(b, &c2), 1.0 / 3.0),
            (dot(b, &ac), 1.0 / 6.0),
            (dot(b, &c3), 0.25),
            (dot(b, &cac), 0.125),
            (dot(b, &a_times(&c2)), 1.0 / 12.0),
            (dot(b, &a_times(&ac)), 1.0 / 24.0),
        ];
        for (k, (got, want)) in checks.iter().enumerate() {
            assert!((got - want).abs() < 1e-13, "fourth-order condition {k}: {got} vs {want}");
        }
        let bh = &B_HAT;
        for (got, want) in [
            (bh.iter().sum::<f64>(), 1.0),
            (dot(bh, &C), 0.5),
            (dot(bh, &c2), 1.0 / 3.0),
            (dot(bh, &ac), 1.0 / 6.0),
        ] {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn stiff_stability_at_infinity() {
        // R(z) = 1 + z b^T (I - zA)^-1 1 tends to 0 as z -> -inf.
        let z = -1e8;
        let mut stage = [0.0; STAGES];
        for i in 0..STAGES {
            let rhs = 1.0 + z * (0..i).map(|j| A[i][j] * stage[j]).sum::<f64>();
            stage[i] = rhs / (1.0 - z * GAMMA);
        }
        let r = 1.0 + z * dot(&A[4], &stage);
        assert!(r.abs() < 1e-6, "R(-inf) = {r}");
    }
}
