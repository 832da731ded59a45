use hes1::config::preset_params;
use hes1::model::omega_violation;
use hes1::ode::{detect_oscillation, integrate, solve, IntegratorConfig, Method, OscillationClass};
use hes1::tikhonov::{eps_sweep, run_figure, Figure, FullState, Reduction, SweepSpec};
use hes1::{Model, StateVector, Variant};

fn cfg(method: Method, rel_tol: f64, t_end: f64) -> IntegratorConfig {
    IntegratorConfig {
        rel_tol,
        abs_tol: rel_tol * 1e-2,
        t_end,
        method,
        sample_dt: 0.5,
        ..IntegratorConfig::default()
    }
}

/// `y' = -lambda (y - sin t) + cos t` has the exact solution `y = sin t`.
#[test]
fn stiff_oracle_solution_both_methods() {
    let sys = (1usize, |t: f64, y: &[f64], dy: &mut [f64]| dy[0] = -1e4 * (y[0] - t.sin()) + t.cos());
    for (method, tol) in [(Method::ImplicitStiff, 1e-6), (Method::ExplicitEmbedded, 1e-6)] {
        let sol = solve(&sys, &[0.0], &cfg(method, 1e-8, 10.0)).unwrap();
        let worst = sol.times.iter().zip(&sol.states).fold(0.0f64, |m, (t, y)| m.max((y[0] - t.sin()).abs()));
        assert!(worst < tol, "{method:?}: {worst:e}");
    }
    // At loose tolerance the explicit method is limited by stability alone.
    let implicit = solve(&sys, &[0.0], &cfg(Method::ImplicitStiff, 1e-4, 10.0)).unwrap();
    let explicit = solve(&sys, &[0.0], &cfg(Method::ExplicitEmbedded, 1e-4, 10.0)).unwrap();
    assert!(implicit.accepted * 20 < explicit.accepted, "{} vs {}", implicit.accepted, explicit.accepted);
}

/// A rotation with decay: `y = e^{-t/10} (cos t, sin t)`.
#[test]
fn error_shrinks_with_tolerance() {
    let sys = (2usize, |_t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = -0.1 * y[0] - y[1];
        dy[1] = y[0] - 0.1 * y[1];
    });
    for method in [Method::ImplicitStiff, Method::ExplicitEmbedded] {
        let errs: Vec<f64> = [1e-4, 1e-7, 1e-10]
            .iter()
            .map(|&tol| {
                let sol = solve(&sys, &[1.0, 0.0], &cfg(method, tol, 20.0)).unwrap();
                sol.times.iter().zip(&sol.states).fold(0.0f64, |m, (t, y)| {
                    let d = (-0.1 * t).exp();
                    m.max((y[0] - d * t.cos()).abs()).max((y[1] - d * t.sin()).abs())
                })
            })
            .collect();
        assert!(errs[1] < errs[0] * 0.1 && errs[2] < errs[1] * 0.1, "{method:?}: {errs:?}");
        assert!(errs[2] < 1e-8);
    }
}

#[test]
fn explicit_and_implicit_agree_on_full_model() {
    let p = preset_params("par-n3").unwrap();
    let model = Model::new(Variant::Full, &p);
    let s0 = StateVector::cold_start(Variant::Full, 3);
    let a = integrate(&model, &s0, &cfg(Method::ImplicitStiff, 1e-10, 100.0)).unwrap();
    let b = integrate(&model, &s0, &cfg(Method::ExplicitEmbedded, 1e-10, 100.0)).unwrap();
    assert_eq!(a.times, b.times);
    for (u, v) in a.states.iter().zip(&b.states) {
        for (x, y) in u.values().iter().zip(v.values()) {
            assert!((x - y).abs() < 1e-7, "{x} vs {y}");
        }
    }
}

#[test]
fn every_level_stays_in_the_invariant_region_and_settles() {
    let p = preset_params("par-n3").unwrap();
    for v in Variant::ALL {
        let model = Model::new(v, &p);
        let traj = integrate(&model, &StateVector::cold_start(v, 3), &cfg(Method::ImplicitStiff, 1e-8, 400.0)).unwrap();
        for s in &traj.states {
            assert!(omega_violation(&p, v, s.values()) < 1e-8, "{v}");
        }
        let ss = model.steady_state().unwrap();
        for (x, y) in traj.final_state().values().iter().zip(ss.values()) {
            assert!((x - y).abs() < 1e-3, "{v}: {x} vs {y}");
        }
        let rep = detect_oscillation(&traj, 0.5, v.y1_index(3)).unwrap();
        assert_ne!(rep.class, OscillationClass::Sustained);
    }
}

#[test]
fn trajectory_csv_header_per_level() {
    let p = preset_params("par-n3").unwrap();
    let expect = [
        (Variant::Full, "t,x0,x1,x2,y1,y2,z"),
        (Variant::NoDimers, "t,x0,x1,x2,y1,z"),
        (Variant::WithDimers, "t,y1,y2,z"),
        (Variant::Classical, "t,y1,z"),
    ];
    for (v, header) in expect {
        let traj = integrate(&Model::new(v, &p), &StateVector::cold_start(v, 3), &cfg(Method::ImplicitStiff, 1e-8, 2.0)).unwrap();
        let csv = traj.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(header));
        assert_eq!(lines.count(), 5);
    }
}

#[test]
fn short_sweep_converges_and_serializes() {
    let p = preset_params("par-n3").unwrap();
    let spec = SweepSpec {
        eps_values: vec![1e-1, 1e-2, 1e-3],
        t_end: 20.0,
        ..SweepSpec::standard()
    };
    for r in Reduction::ALL {
        let res = eps_sweep(r, &p, &FullState::sweep_default(3), &spec).unwrap();
        assert!(res.failures.iter().all(Option::is_none), "{r}");
        assert!(
            res.sup_norm_post_layer.windows(2).all(|w| w[1] < w[0]),
            "{r}: {:?}",
            res.sup_norm_post_layer
        );
        let csv = res.to_csv_string();
        assert!(csv.starts_with("eps,t_layer,slow_full,"));
        assert_eq!(csv.lines().count(), 4);
    }
}

#[test]
fn fig4_run_writes_trajectories_and_verdicts() {
    let run = run_figure(Figure::Fig4).unwrap();
    assert!(run.verdicts.all_match);
    assert_eq!(run.verdicts.verdicts.len(), 4);
    let dir = tempfile::tempdir().unwrap();
    let paths = run.write(dir.path()).unwrap();
    assert_eq!(paths.len(), 5);
    for v in Variant::ALL {
        assert!(dir.path().join(format!("fig4_{v}.csv")).is_file());
    }
    let text = std::fs::read_to_string(dir.path().join("fig4_verdicts.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["figure"], "fig4");
    assert_eq!(json["parameters"]["n"], 3);
    assert_eq!(json["all_match"], true);
    for v in json["verdicts"].as_array().unwrap() {
        assert_eq!(v["match"], true);
        assert!(v["class"].is_string() && v["expected"].is_string());
    }
}
