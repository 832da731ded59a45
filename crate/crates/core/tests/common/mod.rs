//! Seeded parameter draws shared by the integration suites.
#![allow(dead_code)]

use hes1::{BindingPolynomial, DimerParams, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RATE_LO: f64 = 1e-2;
pub const RATE_HI: f64 = 1e2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Log-uniform on `[RATE_LO, RATE_HI]`.
pub fn log_uniform(r: &mut impl Rng) -> f64 {
    log_uniform_in(r, RATE_LO, RATE_HI)
}

pub fn log_uniform_in(r: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + r.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Every rate log-uniform, `k_0 = 1`.
pub fn model_params(r: &mut impl Rng, n: usize) -> ModelParams {
    let mut k = vec![1.0];
    k.extend((1..n).map(|_| log_uniform(r)));
    let gamma = (0..n).map(|_| log_uniform(r)).collect();
    ModelParams::new(
        n,
        k,
        gamma,
        log_uniform(r),
        log_uniform(r),
        log_uniform(r),
        log_uniform(r),
        log_uniform(r),
        log_uniform(r),
    )
    .unwrap()
}

/// Model parameters with binding rates from the same law, `n` uniform on `1..=9`.
pub fn any_model_params(r: &mut impl Rng) -> ModelParams {
    let n = r.random_range(1..=9);
    model_params(r, n)
}

/// With-dimers parameters whose binding polynomial comes from random rates.
pub fn dimer_params(r: &mut impl Rng, n: usize) -> DimerParams {
    let mut k = vec![1.0];
    k.extend((1..n).map(|_| log_uniform(r)));
    let gamma: Vec<f64> = (0..n).map(|_| log_uniform(r)).collect();
    let poly = BindingPolynomial::from_rates(&k, &gamma).unwrap();
    DimerParams::new(log_uniform(r), log_uniform(r), log_uniform(r), log_uniform(r), poly).unwrap()
}

/// Random point of the probability simplex of dimension `m` (flat Dirichlet).
pub fn simplex(r: &mut impl Rng, m: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| -(1.0 - r.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

pub mod strategies {
    use hes1::{DimerParams, ModelParams};
    use proptest::prelude::*;

    pub fn log_rate() -> impl Strategy<Value = f64> {
        (-2.0f64..=2.0).prop_map(|e| 10f64.powf(e))
    }

    pub fn model_params(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ModelParams> {
        n.prop_flat_map(|n| {
            (
                prop::collection::vec(log_rate(), n - 1),
                prop::collection::vec(log_rate(), n),
                prop::array::uniform6(log_rate()),
            )
                .prop_map(move |(k_tail, gamma, [kk, d1, d2, theta, e1, e2])| {
                    let mut k = vec![1.0];
                    k.extend(k_tail);
                    ModelParams::new(n, k, gamma, kk, d1, d2, theta, e1, e2).unwrap()
                })
        })
    }

    pub fn dimer_params(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = DimerParams> {
        model_params(n).prop_map(|p| p.dimer_params())
    }

    /// Occupancies `x_0..x_{n-1}` inside the simplex, with `x_n` absorbing the rest.
    pub fn occupancies(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, n + 1).prop_map(move |w| {
            let total: f64 = w.iter().sum::<f64>().max(1e-300);
            w[..n].iter().map(|v| v / total).collect()
        })
    }

    /// Model parameters together with a full-model state in the invariant box.
    pub fn params_and_state(
        n: std::ops::RangeInclusive<usize>,
    ) -> impl Strategy<Value = (ModelParams, Vec<f64>, f64, f64, f64)> {
        model_params(n).prop_flat_map(|p| {
            let n = p.n();
            (Just(p), occupancies(n), 0.0f64..3.0, 0.0f64..3.0, 0.0f64..3.0)
        })
    }
}
