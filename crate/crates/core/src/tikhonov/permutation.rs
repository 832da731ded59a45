//! Binding model resolved to individual site configurations.
//!
//! Configuration `sigma` is a bit mask over `n` sites. A free site binds at
//! rate `k_j y2 / (n - j)` and an occupied site unbinds at rate `gamma_j`,
//! where `j` is the number of occupied sites. Summing over configurations
//! with `j` occupied sites gives the aggregated chain of the full model.

use crate::error::{Error, Result};
use crate::ode::OdeSystem;
use crate::params::ModelParams;

/// Largest site count accepted; the state has `2^n` configuration entries.
pub const MAX_PERMUTATION_SITES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct PermutationState {
    /// Probability of each occupancy configuration, indexed by bit mask.
    pub x_config: Vec<f64>,
    pub y1: f64,
    pub y2: f64,
    pub z: f64,
}

impl PermutationState {
    /// Spreads aggregated occupancies `x_0..x_{n-1}` evenly over the
    /// configurations of each class; `x_n = 1 - sum x_j`.
    pub fn symmetric(n: usize, x: &[f64], y1: f64, y2: f64, z: f64) -> Result<Self> {
        check_sites(n)?;
        if x.len() != n {
            return Err(Error::InvalidState(format!("need {n} occupancies, got {}", x.len())));
        }
        let mut classes = x.to_vec();
        classes.push(1.0 - x.iter().sum::<f64>());
        let x_config = (0..1usize << n)
            .map(|sigma| {
                let j = sigma.count_ones() as usize;
                classes[j] / binomial(n, j) as f64
            })
            .collect();
        Ok(Self { x_config, y1, y2, z })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.x_config.clone();
        v.extend([self.y1, self.y2, self.z]);
        v
    }
}

fn check_sites(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PERMUTATION_SITES {
        return Err(Error::Unsupported(format!(
            "configuration-level model supports 1 to {MAX_PERMUTATION_SITES} sites, got {n}"
        )));
    }
    Ok(())
}

fn binomial(n: usize, j: usize) -> usize {
    (0..j).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Class totals `x_0..x_n` of a configuration vector.
pub fn aggregate(n: usize, x_config: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for (sigma, v) in x_config.iter().enumerate() {
        out[sigma.count_ones() as usize] += v;
    }
    out
}

fn eval(p: &ModelParams, s: &[f64], out: &mut [f64]) {
    let n = p.n();
    let m = 1usize << n;
    let (xs, rest) = s.split_at(m);
    let (y1, y2, z) = (rest[0], rest[1], rest[2]);
    let k = p.k_binding();
    let g = p.gamma();
    out[..m].iter_mut().for_each(|v| *v = 0.0);
    for (sigma, &x) in xs.iter().enumerate() {
        let j = sigma.count_ones() as usize;
        for site in 0..n {
            let bit = 1usize << site;
            let flux = if sigma & bit == 0 {
                k[j] * y2 / (n - j) as f64 * x
            } else {
                g[j - 1] * x
            };
            out[sigma] -= flux;
            out[sigma ^ bit] += flux;
        }
    }
    out[..m].iter_mut().for_each(|v| *v /= p.eps1());

    let agg = aggregate(n, xs);
    let bound: f64 = (0..n).map(|j| k[j] * agg[j]).sum();
    let unbound: f64 = (1..=n).map(|j| j as f64 * g[j - 1] * agg[j]).sum();
    out[m] = p.kk() * (y2 - y1 * y1) + p.delta1() * (z - y1);
    out[m + 1] = (p.theta() * (unbound - y2 * bound) - y2 + y1 * y1) / p.eps2();
    out[m + 2] = p.delta2() * (p.r0() * agg[0] - z);
}

/// Derivatives laid out as `[x_config.., y1, y2, z]`.
pub fn rhs_permutation(p: &ModelParams, s: &PermutationState) -> Result<Vec<f64>> {
    let n = p.n();
    check_sites(n)?;
    if s.x_config.len() != 1 << n {
        return Err(Error::InvalidState(format!(
            "need {} configuration entries for n = {n}, got {}",
            1 << n,
            s.x_config.len()
        )));
    }
    let v = s.to_vec();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidState("non-finite configuration state".into()));
    }
    if s.x_config.iter().any(|x| *x < 0.0) || s.y1 < 0.0 || s.y2 < 0.0 || s.z < 0.0 {
        return Err(Error::InvalidState("configuration state has negative entries".into()));
    }
    let mut out = vec![0.0; v.len()];
    eval(p, &v, &mut out);
    Ok(out)
}

/// Integrable form of the configuration-level model.
pub struct PermutationSystem {
    params: ModelParams,
}

impl PermutationSystem {
    pub fn new(params: ModelParams) -> Result<Self> {
        check_sites(params.n())?;
        Ok(Self { params })
    }
}

impl OdeSystem for PermutationSystem {
    fn dim(&self) -> usize {
        (1 << self.params.n()) + 3
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        eval(&self.params, y, dy);
    }
}
