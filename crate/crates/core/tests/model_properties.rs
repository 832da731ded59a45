mod common;

use common::strategies::*;
use hes1::config::ParamsConfig;
use hes1::model::{phi, rhs_classical, rhs_full, rhs_no_dimers, rhs_with_dimers};
use hes1::ode::{solve, IntegratorConfig};
use hes1::tikhonov::{aggregate, rhs_permutation, PermutationState, PermutationSystem};
use hes1::{ModelParams, StateVector, Variant};
use proptest::prelude::*;

/// Full-model derivatives written out term by term.
fn full_by_hand(p: &ModelParams, x: &[f64], y1: f64, y2: f64, z: f64) -> Vec<f64> {
    let n = p.n();
    let (k, g) = (p.k_binding(), p.gamma());
    let mut all = x.to_vec();
    all.push(1.0 - x.iter().sum::<f64>());
    let mut out = Vec::new();
    for j in 0..n {
        let gain_up = if j > 0 { k[j - 1] * y2 * all[j - 1] } else { 0.0 };
        let gain_down = (j + 1) as f64 * g[j] * all[j + 1];
        let loss = (k[j] * y2 + if j > 0 { j as f64 * g[j - 1] } else { 0.0 }) * all[j];
        out.push((gain_up + gain_down - loss) / p.eps1());
    }
    let released: f64 = (1..=n).map(|j| j as f64 * g[j - 1] * all[j]).sum();
    let captured: f64 = (0..n).map(|j| k[j] * all[j]).sum::<f64>() * y2;
    out.push(p.kk() * (y2 - y1 * y1) + p.delta1() * (z - y1));
    out.push((p.theta() * (released - captured) - y2 + y1 * y1) / p.eps2());
    out.push(p.delta2() * (p.r0() * all[0] - z));
    out
}

fn close(a: &[f64], b: &[f64], rel: f64) -> bool {
    let scale = a.iter().chain(b).fold(1.0f64, |m, v| m.max(v.abs()));
    a.len() == b.len() && a.iter().zip(b).all(|(u, v)| (u - v).abs() <= rel * scale)
}

fn full_state(x: &[f64], tail: [f64; 3]) -> StateVector {
    StateVector::new(Variant::Full, [x, &tail].concat()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn full_rhs_matches_hand_expansion((p, x, y1, y2, z) in params_and_state(1..=9)) {
        let got = rhs_full(&p, &full_state(&x, [y1, y2, z])).unwrap();
        prop_assert!(close(&got, &full_by_hand(&p, &x, y1, y2, z), 1e-13));
    }

    #[test]
    fn binding_chain_conserves_probability((p, x, y1, y2, z) in params_and_state(1..=9)) {
        let n = p.n();
        let f = rhs_full(&p, &full_state(&x, [y1, y2, z])).unwrap();
        let x_n = 1.0 - x.iter().sum::<f64>();
        let d_last = (p.k_binding()[n - 1] * y2 * x[n - 1] - n as f64 * p.gamma()[n - 1] * x_n) / p.eps1();
        let total: f64 = f[..n].iter().sum::<f64>() + d_last;
        let scale = f[..n].iter().fold(d_last.abs(), |m, v| m.max(v.abs())).max(1.0);
        prop_assert!(total.abs() <= 1e-12 * scale);
    }

    #[test]
    fn no_dimers_is_full_on_the_dimer_manifold((p, x, y1, _y2, z) in params_and_state(1..=9)) {
        let n = p.n();
        let (k, g) = (p.k_binding(), p.gamma());
        let mut all = x.clone();
        all.push(1.0 - x.iter().sum::<f64>());
        let released: f64 = (1..=n).map(|j| j as f64 * g[j - 1] * all[j]).sum();
        let capture: f64 = (0..n).map(|j| k[j] * all[j]).sum();
        let y2 = (y1 * y1 + p.theta() * released) / (1.0 + p.theta() * capture);
        prop_assert!((phi(&p, &x, y1).unwrap() - y2).abs() <= 1e-13 * y2.max(1.0));

        let full = rhs_full(&p, &full_state(&x, [y1, y2, z])).unwrap();
        let scale = full.iter().fold(1.0f64, |m, v| m.max(v.abs())) * p.eps2().recip().max(1.0);
        prop_assert!(full[n + 1].abs() <= 1e-12 * scale);
        let nd = StateVector::new(Variant::NoDimers, [x.as_slice(), &[y1, z]].concat()).unwrap();
        let reduced = rhs_no_dimers(&p, &nd).unwrap();
        let projected: Vec<f64> = full[..n].iter().chain([&full[n], &full[n + 2]]).copied().collect();
        prop_assert!(close(&reduced, &projected, 1e-12));
    }

    #[test]
    fn single_site_no_dimers_closed_form((p, x, y1, _y2, z) in params_and_state(1..=1)) {
        let x0 = x[0];
        let g1 = p.gamma()[0];
        let net = (g1 * (1.0 - x0) - x0 * y1 * y1) / (1.0 + p.theta() * x0);
        let expect = [
            net / p.eps1(),
            p.kk() * p.theta() * net + p.delta1() * (z - y1),
            p.delta2() * (p.r0() * x0 - z),
        ];
        let s = StateVector::new(Variant::NoDimers, vec![x0, y1, z]).unwrap();
        prop_assert!(close(&rhs_no_dimers(&p, &s).unwrap(), &expect, 1e-13));
        prop_assert!((p.r0() - (1.0 + 1.0 / g1)).abs() <= 1e-14 * p.r0());
    }

    #[test]
    fn reduced_models_by_hand((p, _x, y1, y2, z) in params_and_state(1..=9)) {
        let d = p.dimer_params();
        let psi = |y: f64| {
            let (k, g) = (p.k_binding(), p.gamma());
            let mut c = 1.0;
            let mut q = 0.0;
            for j in 0..p.n() {
                c *= k[j] / ((j + 1) as f64 * g[j]);
                q += c * y.powi(j as i32 + 1);
            }
            1.0 / (1.0 + q)
        };
        let wd = rhs_with_dimers(&d, &StateVector::new(Variant::WithDimers, vec![y1, y2, z]).unwrap()).unwrap();
        let want = [
            p.kk() * (y2 - y1 * y1) + p.delta1() * (z - y1),
            (y1 * y1 - y2) / p.eps2(),
            p.delta2() * (p.r0() * psi(y2) - z),
        ];
        prop_assert!(close(&wd, &want, 1e-13));
        let cl = rhs_classical(&d, &StateVector::new(Variant::Classical, vec![y1, z]).unwrap()).unwrap();
        let want = [p.delta1() * (z - y1), p.delta2() * (p.r0() * psi(y1 * y1) - z)];
        prop_assert!(close(&cl, &want, 1e-13));
    }

    #[test]
    fn occupancy_distribution_and_monotone_repression(p in model_params(1..=9), y in 0.0f64..4.0) {
        let poly = p.poly();
        let occ = poly.occupancy(y);
        let last = poly.coeffs()[p.n() - 1] * y.powi(p.n() as i32) * poly.psi(y);
        prop_assert!((occ.iter().sum::<f64>() + last - 1.0).abs() <= 1e-13);
        prop_assert!(poly.psi(y + 1e-3) < poly.psi(y));
        prop_assert!(poly.psi_prime(y) <= 0.0);
        let h = 1e-6;
        let fd = (poly.psi(y + h) - poly.psi((y - h).max(0.0))) / (y + h - (y - h).max(0.0));
        prop_assert!((fd - poly.psi_prime(y)).abs() <= 1e-6 * poly.psi_prime(y).abs().max(1.0));
    }

    #[test]
    fn configuration_model_aggregates_and_conserves(
        (p, _x, y1, y2, z) in params_and_state(2..=4),
        weights in prop::collection::vec(0.01f64..1.0, 16),
    ) {
        let n = p.n();
        let m = 1 << n;
        let total: f64 = weights[..m].iter().sum();
        let config: Vec<f64> = weights[..m].iter().map(|w| w / total).collect();
        let s = PermutationState { x_config: config.clone(), y1, y2, z };
        let d = rhs_permutation(&p, &s).unwrap();
        let scale = d.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        prop_assert!(d[..m].iter().sum::<f64>().abs() <= 1e-13 * scale);
        let agg = aggregate(n, &config);
        let full = rhs_full(&p, &full_state(&agg[..n], [y1, y2, z])).unwrap();
        let d_agg = aggregate(n, &d[..m]);
        let lhs: Vec<f64> = d_agg[..n].iter().chain(&d[m..]).copied().collect();
        prop_assert!(close(&lhs, &full, 1e-12));
    }

    #[test]
    fn params_survive_config_round_trip(p in model_params(1..=9)) {
        let text = ParamsConfig::from_params(&p).to_toml_string();
        let back = ParamsConfig::from_toml_str(&text).unwrap().to_params().unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn symmetric_configurations_stay_symmetric() {
    let p = hes1::config::preset_params("par-n3").unwrap();
    let s0 = PermutationState::symmetric(3, &[0.4, 0.3, 0.2], 0.5, 0.1, 0.2).unwrap();
    let cfg = IntegratorConfig {
        t_end: 20.0,
        sample_dt: 1.0,
        ..IntegratorConfig::default()
    };
    let sol = solve(&PermutationSystem::new(p).unwrap(), &s0.to_vec(), &cfg).unwrap();
    for state in &sol.states {
        for class in 0..=3u32 {
            let members: Vec<f64> = (0..8usize)
                .filter(|s| s.count_ones() == class)
                .map(|s| state[s])
                .collect();
            let spread = members.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - members.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(spread <= 1e-9, "class {class} spread {spread:e}");
        }
        assert!((state[..8].iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}
