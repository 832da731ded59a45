use super::{err_norm, IntegratorConfig, OdeSystem, StepOutcome, Stepper};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Dormand-Prince 5(4), first-same-as-last, PI step control.
pub(crate) struct Dopri5 {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    err: Vec<f64>,
    fac_old: f64,
}

impl Dopri5 {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
            err: vec![0.0; dim],
            fac_old: 1e-4,
        }
    }
}

impl Stepper for Dopri5 {
    const ORDER: i32 = 5;

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
        self.k[0].copy_from_slice(f);
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * self.k[j][i];
                }
                self.tmp[i] = y[i] + h * acc;
            }
            sys.rhs(t + C[s] * h, &self.tmp, &mut self.k[s]);
        }
        // Stage 7 is evaluated at the fifth-order solution.
        y_new.copy_from_slice(&self.tmp);
        for i in 0..dim {
            self.err[i] = h * (0..7).map(|s| E[s] * self.k[s][i]).sum::<f64>();
        }
        let err = err_norm(&self.err, y, y_new, cfg.rel_tol, cfg.abs_tol);
        if !err.is_finite() {
            *h_next = h * FAC_MIN;
            return StepOutcome::Rejected { err };
        }
        let expo = 0.2 - BETA * 0.75;
        let fac11 = err.powf(expo);
        if err <= 1.0 {
            let fac = (fac11 / self.fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            self.fac_old = err.max(1e-4);
            *h_next = h / fac;
            f_new.copy_from_slice(&self.k[6]);
            StepOutcome::Accepted
        } else {
            *h_next = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
            StepOutcome::Rejected { err }
        }
    }
}
