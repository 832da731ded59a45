//! Right-hand sides of the four model levels, the quasi-stationary maps and
//! the invariant-box membership test.
//!
//! All right-hand sides are in explicit form: the `1/eps1` and `1/eps2`
//! factors are already applied.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ode::OdeSystem;
use crate::params::{invariant_region, DimerParams, ModelParams};
use crate::state::{StateVector, Variant, OMEGA_X_TOL};

/// `x_j` in `[-OMEGA_X_TOL, 0)` is treated as zero inside `phi`.
fn clamp_occupancy(x: f64) -> f64 {
    if (-OMEGA_X_TOL..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// Binding-chain derivatives for occupancies `x_0..x_{n-1}` with
/// `x_n = 1 - sum x_j`, divided by `eps1`.
fn binding_rhs(p: &ModelParams, x: &[f64], y2: f64, out: &mut [f64]) {
    let n = p.n();
    let k = p.k_binding();
    let g = p.gamma();
    let xn = 1.0 - x.iter().sum::<f64>();
    for j in 0..n {
        let next = if j + 1 < n { x[j + 1] } else { xn };
        let unbind = if j > 0 { j as f64 * g[j - 1] } else { 0.0 };
        let mut v = (j + 1) as f64 * g[j] * next - (k[j] * y2 + unbind) * x[j];
        if j > 0 {
            v += k[j - 1] * y2 * x[j - 1];
        }
        out[j] = v / p.eps1();
    }
}

/// `-y2 sum k_j x_j + sum_{j=1}^{n-1} j gamma_j x_j + n gamma_n x_n`: net
/// dimer release by the binding chain, before the `theta` factor.
fn dimer_release(p: &ModelParams, x: &[f64], y2: f64) -> f64 {
    let n = p.n();
    if n == 0 {
        return 0.0;
    }
    let g = p.gamma();
    let xn = 1.0 - x.iter().sum::<f64>();
    let bound: f64 = k_dot(p, x);
    let unbound: f64 = (1..n).map(|j| j as f64 * g[j - 1] * x[j]).sum::<f64>() + n as f64 * g[n - 1] * xn;
    unbound - y2 * bound
}

fn k_dot(p: &ModelParams, x: &[f64]) -> f64 {
    p.k_binding().iter().zip(x).map(|(k, x)| k * x).sum()
}

/// Free-promoter fraction `x0`; the promoter is always free without sites.
fn free_promoter(x: &[f64]) -> f64 {
    x.first().copied().unwrap_or(1.0)
}

fn phi_unchecked(p: &ModelParams, x: &[f64], y1: f64) -> f64 {
    let n = p.n();
    if n == 0 {
        return y1 * y1;
    }
    let g = p.gamma();
    let mut sum = 0.0;
    let mut weighted = 0.0;
    let mut kx = 0.0;
    for (j, xj) in x.iter().enumerate() {
        let xj = clamp_occupancy(*xj);
        sum += xj;
        kx += p.k_binding()[j] * xj;
        if j > 0 {
            weighted += j as f64 * g[j - 1] * xj;
        }
    }
    weighted += n as f64 * g[n - 1] * (1.0 - sum);
    (y1 * y1 + p.theta() * weighted) / (1.0 + p.theta() * kx)
}

fn full_kernel(p: &ModelParams, s: &[f64], out: &mut [f64]) {
    let n = p.n();
    let (x, rest) = s.split_at(n);
    let (y1, y2, z) = (rest[0], rest[1], rest[2]);
    binding_rhs(p, x, y2, &mut out[..n]);
    out[n] = p.kk() * (y2 - y1 * y1) + p.delta1() * (z - y1);
    out[n + 1] = (p.theta() * dimer_release(p, x, y2) - y2 + y1 * y1) / p.eps2();
    out[n + 2] = p.delta2() * (p.r0() * free_promoter(x) - z);
}

fn no_dimers_kernel(p: &ModelParams, s: &[f64], out: &mut [f64]) {
    let n = p.n();
    let (x, rest) = s.split_at(n);
    let (y1, z) = (rest[0], rest[1]);
    let y2 = phi_unchecked(p, x, y1);
    binding_rhs(p, x, y2, &mut out[..n]);
    out[n] = p.kk() * (y2 - y1 * y1) + p.delta1() * (z - y1);
    out[n + 1] = p.delta2() * (p.r0() * free_promoter(x) - z);
}

fn with_dimers_kernel(d: &DimerParams, s: &[f64], out: &mut [f64]) {
    let (y1, y2, z) = (s[0], s[1], s[2]);
    out[0] = d.kk * (y2 - y1 * y1) + d.delta1 * (z - y1);
    out[1] = (y1 * y1 - y2) / d.eps2;
    out[2] = d.delta2 * (d.r0() * d.poly.psi(y2.max(0.0)) - z);
}

fn classical_kernel(d: &DimerParams, s: &[f64], out: &mut [f64]) {
    let (y1, z) = (s[0], s[1]);
    out[0] = d.delta1 * (z - y1);
    out[1] = d.delta2 * (d.r0() * d.poly.psi(y1 * y1) - z);
}

/// One model level bound to its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Full(ModelParams),
    NoDimers(ModelParams),
    WithDimers(DimerParams),
    Classical(DimerParams),
}

impl Model {
    pub fn new(variant: Variant, p: &ModelParams) -> Self {
        match variant {
            Variant::Full => Model::Full(p.clone()),
            Variant::NoDimers => Model::NoDimers(p.clone()),
            Variant::WithDimers => Model::WithDimers(p.dimer_params()),
            Variant::Classical => Model::Classical(p.dimer_params()),
        }
    }

    pub fn variant(&self) -> Variant {
        match self {
            Model::Full(_) => Variant::Full,
            Model::NoDimers(_) => Variant::NoDimers,
            Model::WithDimers(_) => Variant::WithDimers,
            Model::Classical(_) => Variant::Classical,
        }
    }

    /// Number of binding sites.
    pub fn n(&self) -> usize {
        match self {
            Model::Full(p) | Model::NoDimers(p) => p.n(),
            Model::WithDimers(d) | Model::Classical(d) => d.poly.degree(),
        }
    }

    pub fn r0(&self) -> f64 {
        match self {
            Model::Full(p) | Model::NoDimers(p) => p.r0(),
            Model::WithDimers(d) | Model::Classical(d) => d.r0(),
        }
    }

    /// Right-hand side at a validated state.
    pub fn rhs(&self, s: &StateVector) -> Result<Vec<f64>> {
        if s.variant() != self.variant() {
            return Err(Error::InvalidState(format!(
                "{} state passed to the {} model",
                s.variant(),
                self.variant()
            )));
        }
        s.validate(self.n())?;
        let mut out = vec![0.0; s.values().len()];
        self.eval(s.values(), &mut out);
        Ok(out)
    }

    /// Right-hand side without validation. Used inside integrators, where
    /// states may leave the domain by round-off.
    pub fn eval(&self, s: &[f64], out: &mut [f64]) {
        match self {
            Model::Full(p) => full_kernel(p, s, out),
            Model::NoDimers(p) => no_dimers_kernel(p, s, out),
            Model::WithDimers(d) => with_dimers_kernel(d, s, out),
            Model::Classical(d) => classical_kernel(d, s, out),
        }
    }

    /// Closed-form positive steady state, checked by residual.
    pub fn steady_state(&self) -> Result<StateVector> {
        let values = match self {
            Model::Full(p) => {
                let mut v = p.poly().occupancy(1.0);
                v.extend([1.0, 1.0, 1.0]);
                v
            }
            Model::NoDimers(p) => {
                let mut v = p.poly().occupancy(1.0);
                v.extend([1.0, 1.0]);
                v
            }
            Model::WithDimers(_) => vec![1.0, 1.0, 1.0],
            Model::Classical(_) => vec![1.0, 1.0],
        };
        let mut out = vec![0.0; values.len()];
        self.eval(&values, &mut out);
        let residual = out.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !(residual <= STEADY_STATE_RESIDUAL_LIMIT) {
            return Err(Error::SteadyStateResidual {
                variant: self.variant().name(),
                residual,
                limit: STEADY_STATE_RESIDUAL_LIMIT,
            });
        }
        StateVector::new(self.variant(), values)
    }
}

impl OdeSystem for Model {
    fn dim(&self) -> usize {
        self.variant().dim(self.n())
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        self.eval(y, dy);
    }

    fn jacobian(&self, _t: f64, y: &[f64], jac: &mut DMatrix<f64>) -> bool {
        match self {
            Model::WithDimers(d) => {
                let (y1, y2) = (y[0], y[1]);
                let a = 2.0 * d.kk * y1 + d.delta1;
                jac.copy_from_slice(&[
                    -a,
                    2.0 * y1 / d.eps2,
                    0.0,
                    d.kk,
                    -1.0 / d.eps2,
                    d.delta2 * d.r0() * d.poly.psi_prime(y2.max(0.0)),
                    d.delta1,
                    0.0,
                    -d.delta2,
                ]);
                true
            }
            Model::Classical(d) => {
                let y1 = y[0];
                jac.copy_from_slice(&[
                    -d.delta1,
                    d.delta2 * d.r0() * d.poly.psi_prime(y1 * y1) * 2.0 * y1,
                    d.delta1,
                    -d.delta2,
                ]);
                true
            }
            _ => false,
        }
    }
}

/// Max-norm bound on the right-hand side at the closed-form steady state.
pub const STEADY_STATE_RESIDUAL_LIMIT: f64 = 1e-10;

fn expect_variant(s: &StateVector, v: Variant) -> Result<()> {
    if s.variant() == v {
        Ok(())
    } else {
        Err(Error::InvalidState(format!("expected a {v} state, got {}", s.variant())))
    }
}

/// Full model: binding chain, monomers, dimers, mRNA.
pub fn rhs_full(p: &ModelParams, s: &StateVector) -> Result<Vec<f64>> {
    expect_variant(s, Variant::Full)?;
    Model::Full(p.clone()).rhs(s)
}

/// Full model with dimers replaced by `phi(x, y1)`.
pub fn rhs_no_dimers(p: &ModelParams, s: &StateVector) -> Result<Vec<f64>> {
    expect_variant(s, Variant::NoDimers)?;
    Model::NoDimers(p.clone()).rhs(s)
}

/// Dimer model with the binding chain replaced by `psi(y2)`.
pub fn rhs_with_dimers(d: &DimerParams, s: &StateVector) -> Result<Vec<f64>> {
    expect_variant(s, Variant::WithDimers)?;
    Model::WithDimers(d.clone()).rhs(s)
}

/// Two-variable loop `y1' = delta1 (z - y1)`, `z' = delta2 (r0 psi(y1^2) - z)`.
pub fn rhs_classical(d: &DimerParams, s: &StateVector) -> Result<Vec<f64>> {
    expect_variant(s, Variant::Classical)?;
    Model::Classical(d.clone()).rhs(s)
}

/// Quasi-stationary dimer level for occupancies `x_0..x_{n-1}` and monomer
/// level `y1`.
pub fn phi(p: &ModelParams, x: &[f64], y1: f64) -> Result<f64> {
    if x.len() != p.n() {
        return Err(Error::InvalidState(format!(
            "phi needs {} occupancies, got {}",
            p.n(),
            x.len()
        )));
    }
    let mut s = x.to_vec();
    s.extend([y1, 0.0]);
    StateVector::new(Variant::NoDimers, s)?.validate(p.n())?;
    Ok(phi_unchecked(p, x, y1))
}

/// `psi(y2) = 1 / (1 + q(y2))`, the quasi-stationary free-promoter fraction.
pub fn psi(p: &ModelParams, y2: f64) -> f64 {
    p.poly().psi(y2)
}

/// Quasi-stationary occupancies `x_0..x_{n-1}` at dimer level `y2`.
pub fn psi_occupancy(p: &ModelParams, y2: f64) -> Vec<f64> {
    p.poly().occupancy(y2)
}

/// Hill repression `a^h / (a^h + y^h)`.
pub fn hill_psi(a: f64, h: f64, y: f64) -> f64 {
    // Divide through by a^h so large h does not overflow.
    1.0 / (1.0 + (y / a).powf(h))
}

/// Steady state of the given level at `y1 = y2 = z = 1`.
pub fn steady_state(p: &ModelParams, variant: Variant) -> Result<StateVector> {
    Model::new(variant, p).steady_state()
}

/// Positive root of `y1 = r0 psi(y1^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyY1 {
    pub root: f64,
    /// Set when the root is more than [`Y1_INCONSISTENCY_TOL`] away from 1,
    /// meaning `r0` does not match the occupancy polynomial.
    pub inconsistent: bool,
}

pub const Y1_INCONSISTENCY_TOL: f64 = 1e-8;

/// Solves the scalar steady-state equation for `y1` with the model's `r0`.
pub fn steady_state_solve_y1(p: &ModelParams) -> Result<SteadyY1> {
    solve_y1_with_r0(p.poly(), p.r0())
}

/// Solves `y1 = r0 / (1 + q(y1^2))` by bisection on `[0, r0]` for an
/// arbitrary `r0`.
pub fn solve_y1_with_r0(poly: &crate::params::BindingPolynomial, r0: f64) -> Result<SteadyY1> {
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::InvalidParams(format!("r0 must be positive, got {r0}")));
    }
    let root = crate::numeric::bisect_increasing(|y| y - r0 * poly.psi(y * y), 0.0, r0)?;
    Ok(SteadyY1 {
        root,
        inconsistent: (root - 1.0).abs() > Y1_INCONSISTENCY_TOL,
    })
}

/// Largest amount by which a state leaves the invariant set: `x in Omega_x`,
/// `0 <= y1 <= ybar1`, `0 <= y2 <= ybar2`, `0 <= z <= r0`. Zero or negative
/// means inside.
pub fn omega_violation(p: &ModelParams, variant: Variant, s: &[f64]) -> f64 {
    let r = invariant_region(p);
    let n = p.n();
    let split = if variant.has_binding() { n } else { 0 };
    let (x, rest) = s.split_at(split);
    let mut worst = f64::NEG_INFINITY;
    for xj in x {
        worst = worst.max(-xj);
    }
    if variant.has_binding() {
        worst = worst.max(x.iter().sum::<f64>() - 1.0);
    }
    let bounds: &[f64] = match variant {
        Variant::Full | Variant::WithDimers => &[r.ybar1, r.ybar2, r.zbar],
        Variant::NoDimers | Variant::Classical => &[r.ybar1, r.zbar],
    };
    for (v, b) in rest.iter().zip(bounds) {
        worst = worst.max(-v).max(v - b);
    }
    worst
}
