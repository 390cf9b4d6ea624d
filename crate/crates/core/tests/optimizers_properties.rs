use fracopt::fracops::FractionalOperator;
use fracopt::optimizers::{
    oscillation_census, run, run_fctm, run_fgdm, run_gdm, stability_envelope_check, energy_trace,
    Method,
};
use fracopt::problems::{make_vandermonde, CoefficientSource, NodeRule};
use fracopt::specfun::{mittag_leffler, MlSeriesConfig};
use fracopt::{
    make_quadratic, Error, FractionalOrder, MemoryWindow, Metric, Objective, OptimizerConfig, StoppingRule,
};
use proptest::prelude::*;

fn ord(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn fctm_cfg(alpha: f64, h: f64) -> OptimizerConfig {
    OptimizerConfig::fctm(ord(alpha), 1.0, h)
}

#[test]
fn gdm_examples() {
    let q = make_quadratic(3.0);
    let stop = StoppingRule::iterations(Metric::DistanceToOptimum, 200);
    let r = run_gdm(&q, &[1.0], &OptimizerConfig::gdm(0.1), &stop).unwrap();
    assert!((r.converged_to[0] - 3.0).abs() <= 1e-8);
    for w in r.metrics.windows(2).take(20) {
        assert!((w[1] / w[0] - 0.8).abs() < 1e-9);
    }

    let err = run_gdm(&q, &[1.0], &OptimizerConfig::gdm(1.1), &StoppingRule::iterations(Metric::Value, 100_000));
    assert!(matches!(err, Err(Error::Divergence { .. })));

    let r = run_gdm(&q, &[3.0], &OptimizerConfig::gdm(0.1), &stop).unwrap();
    assert!(r.trace.states().iter().all(|s| s[0] == 3.0));
}

#[test]
fn gdm_is_monotone_below_the_curvature_limit() {
    let q = make_quadratic(3.0);
    let stop = StoppingRule::iterations(Metric::Value, 500);
    for omega in [0.05, 0.15, 0.25] {
        let r = run_gdm(&q, &[-4.0], &OptimizerConfig::gdm(omega), &stop).unwrap();
        assert!(r.metrics.windows(2).all(|w| w[1] <= w[0]));
    }

    // curvature of ‖Xu - g‖² is 2 σ_max²; bound σ_max² by the Frobenius norm
    let v = make_vandermonde(10, NodeRule::Uniform, CoefficientSource::Alternating).unwrap();
    let frob2: f64 = v.spec().matrix.iter().map(|x| x * x).sum();
    let omega = 1.0 / (2.0 * 2.0 * frob2);
    let r = run_gdm(&v, &[0.0; 11], &OptimizerConfig::gdm(omega), &StoppingRule::iterations(Metric::Value, 2000)).unwrap();
    assert!(r.metrics.windows(2).all(|w| w[1] <= w[0]));
    assert!(r.final_metric < r.metrics[0]);
}

#[test]
fn fgdm_converges_to_shifted_equilibrium() {
    let q = make_quadratic(3.0);
    let stop = StoppingRule::iterations(Metric::DistanceToOptimum, 5000);
    for alpha in [0.7, 0.8, 0.9] {
        let cfg = OptimizerConfig::fgdm(ord(alpha), 0.05, FractionalOperator::Caputo, MemoryWindow::fixed(0.0));
        let r = run_fgdm(&q, 1.0, &cfg, &stop).unwrap();
        let u = r.converged_to[0];
        assert!((u - 3.0 * (2.0 - alpha)).abs() <= 1e-3, "alpha = {alpha}: {u}");
        assert!((u - 3.0).abs() >= 3.0 * (1.0 - alpha) - 1e-3);
        if alpha == 0.9 {
            assert!((u - 3.3).abs() <= 1e-4);
        }
    }

    let cfg = OptimizerConfig::fgdm(ord(1.0), 0.05, FractionalOperator::Caputo, MemoryWindow::fixed(0.0));
    let r = run_fgdm(&q, 1.0, &cfg, &stop).unwrap();
    assert!((r.converged_to[0] - 3.0).abs() <= 1e-8);
}

#[test]
fn short_memory_fgdm_approaches_the_extremum() {
    let q = make_quadratic(3.0);
    let h = 1e-3;
    let stop = StoppingRule::iterations(Metric::DistanceToOptimum, 5000);
    for alpha in [0.7, 0.8, 0.9] {
        let w = MemoryWindow::new(0.0, h, h).unwrap();
        let cfg = OptimizerConfig::fgdm(ord(alpha), 0.05, FractionalOperator::Caputo, w);
        let r = run_fgdm(&q, 1.0, &cfg, &stop).unwrap();
        let expected = 3.0 + h * (1.0 - alpha) / (2.0 - alpha);
        assert!((r.converged_to[0] - expected).abs() <= 5e-4, "alpha = {alpha}: {}", r.converged_to[0]);
    }
}

#[test]
fn riemann_liouville_fgdm_misses_the_extremum() {
    let q = make_quadratic(3.0);
    let cfg = OptimizerConfig::fgdm(ord(0.9), 0.05, FractionalOperator::RiemannLiouville, MemoryWindow::fixed(0.0));
    let r = run_fgdm(&q, 1.0, &cfg, &StoppingRule::iterations(Metric::DistanceToOptimum, 5000)).unwrap();
    let u = r.converged_to[0];
    assert!((u - 3.0).abs() > 0.05, "{u}");
    // the fixed point is a zero of the RL slope
    let slope = fracopt::optimizers::fractional_slope(
        &q,
        FractionalOperator::RiemannLiouville,
        ord(0.9),
        &MemoryWindow::fixed(0.0),
        u,
    )
    .unwrap();
    assert!(slope.abs() < 1e-8);
}

#[test]
fn fgdm_rejects_vector_objectives() {
    let v = make_vandermonde(2, NodeRule::Uniform, CoefficientSource::Alternating).unwrap();
    let cfg = OptimizerConfig::fgdm(ord(0.9), 0.05, FractionalOperator::Caputo, MemoryWindow::fixed(0.0));
    let stop = StoppingRule::iterations(Metric::Value, 10);
    assert!(matches!(run(&v, &[0.0; 3], &cfg, &stop), Err(Error::Scope(_))));
}

#[test]
fn fctm_equilibrium_is_the_extremum() {
    let q = make_quadratic(3.0);
    let mut reached = 0;
    for alpha in [0.9, 1.0, 1.3, 1.6] {
        let stop = StoppingRule::horizon(Metric::DistanceToOptimum, 2000.0)
            .with_thresholds(vec![0.1, 4e-4])
            .with_stop_below(4e-4);
        let r = run_fctm(&q, &[1.0], &fctm_cfg(alpha, 0.05), &stop).unwrap();
        if r.passage(4e-4).is_some() {
            reached += 1;
            assert!(q.gradient_vec(&r.converged_to).unwrap()[0].abs() <= 1e-3);
        }
    }
    let v = make_vandermonde(2, NodeRule::Uniform, CoefficientSource::Alternating).unwrap();
    for alpha in [1.0, 1.3] {
        let stop = StoppingRule::horizon(Metric::ResidualNorm, 3000.0)
            .with_thresholds(vec![1e-2, 1e-4])
            .with_stop_below(1e-4);
        let r = run_fctm(&v, &[0.0; 3], &fctm_cfg(alpha, 0.05), &stop).unwrap();
        if r.passage(1e-4).is_some() {
            reached += 1;
            let g = v.gradient_vec(&r.converged_to).unwrap();
            assert!(g.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1e-3);
        }
    }
    assert!(reached >= 5, "only {reached} runs reached the tightest threshold");
}

#[test]
fn integer_order_flow_matches_gradient_descent() {
    let q = make_quadratic(3.0);
    for h in [0.01, 0.005] {
        let flow = run_fctm(&q, &[1.0], &fctm_cfg(1.0, h), &StoppingRule::horizon(Metric::DistanceToOptimum, 5.0)).unwrap();
        let steps = (5.0 / h).round() as usize;
        let gd = run_gdm(&q, &[1.0], &OptimizerConfig::gdm(h), &StoppingRule::iterations(Metric::DistanceToOptimum, steps))
            .unwrap();
        let gap = flow
            .trace
            .states()
            .iter()
            .zip(gd.trace.states())
            .map(|(a, b)| (a[0] - b[0]).abs())
            .fold(0.0, f64::max);
        assert!(gap <= 2.0 * h, "h = {h}: gap {gap}");
    }
}

#[test]
fn fctm_quadratic_matches_mittag_leffler() {
    let q = make_quadratic(3.0);
    let ml = MlSeriesConfig::default();
    for alpha in [0.5, 0.9, 1.2, 1.7] {
        let r = run_fctm(&q, &[1.0], &fctm_cfg(alpha, 1e-3), &StoppingRule::horizon(Metric::DistanceToOptimum, 10.0))
            .unwrap();
        let traj = r.trace.trajectory().unwrap();
        let err = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(t, s)| {
                let exact = 3.0 - 2.0 * mittag_leffler(ord(alpha), 1.0, -2.0 * t.powf(alpha), &ml).unwrap();
                (s[0] - exact).abs()
            })
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "alpha = {alpha}: {err:e}");
    }
}

#[test]
fn slower_approach_for_lower_orders() {
    let q = make_quadratic(3.0);
    let stop = StoppingRule::horizon(Metric::DistanceToOptimum, 10.0);
    let half = run_fctm(&q, &[1.0], &fctm_cfg(0.5, 1e-3), &stop).unwrap();
    let one = run_fctm(&q, &[1.0], &fctm_cfg(1.0, 1e-3), &stop).unwrap();
    assert!(half.metrics.windows(2).all(|w| w[1] <= w[0]));
    for k in [1000, 5000, 10_000] {
        assert!(half.metrics[k] > one.metrics[k]);
    }
}

#[test]
fn energy_envelope_and_oscillations() {
    let q = make_quadratic(3.0);
    let stop = StoppingRule::horizon(Metric::DistanceToOptimum, 20.0);
    for alpha in [0.3, 0.7, 1.0] {
        let r = run_fctm(&q, &[1.0], &fctm_cfg(alpha, 1e-2), &stop).unwrap();
        let check = stability_envelope_check(r.trace.trajectory().unwrap(), &[3.0], 2.0, ord(alpha)).unwrap();
        assert!(check.passed, "alpha = {alpha}: excess {}", check.max_excess);
    }
    let r = run_fctm(&q, &[1.0], &fctm_cfg(0.7, 1e-2), &stop).unwrap();
    let e = energy_trace(r.trace.trajectory().unwrap(), &[3.0], 2.0);
    assert_eq!(oscillation_census(&e), 0);
    assert!(e.is_nonincreasing());

    let r = run_fctm(&q, &[1.0], &fctm_cfg(1.5, 1e-2), &stop).unwrap();
    let e = energy_trace(r.trace.trajectory().unwrap(), &[3.0], 2.0);
    assert!(oscillation_census(&e) >= 1);
    assert!(!e.is_nonincreasing());
    assert!(matches!(
        stability_envelope_check(r.trace.trajectory().unwrap(), &[3.0], 2.0, ord(1.5)),
        Err(Error::Scope(_))
    ));
}

#[test]
fn initial_velocity_override() {
    let q = make_quadratic(3.0);
    let stop = StoppingRule::horizon(Metric::DistanceToOptimum, 1.0);
    let still = run_fctm(&q, &[1.0], &fctm_cfg(1.5, 1e-3), &stop).unwrap();
    let cfg = OptimizerConfig::Fctm { alpha: ord(1.5), lambda: 1.0, h: 1e-3, v0: Some(vec![0.5]) };
    let pushed = run_fctm(&q, &[1.0], &cfg, &stop).unwrap();
    assert!(pushed.converged_to[0] > still.converged_to[0]);
}

#[test]
fn dispatch_and_labels() {
    let q = make_quadratic(3.0);
    let cfg = fctm_cfg(0.7, 0.01);
    assert_eq!(cfg.method(), Method::Fctm);
    assert_eq!(cfg.label(), "FCTM(alpha=0.7)");
    let r = run(&q, &[1.0], &cfg, &StoppingRule::horizon(Metric::Value, 1.0)).unwrap();
    assert_eq!(r.label, "FCTM(alpha=0.7)");
    assert_eq!(r.cost.field_evaluations, 1 + 2 * 100);
    assert_eq!(r.final_metric, *r.metrics.last().unwrap());
    assert_eq!(r.metrics.len(), r.trace.len());

    let mut buf = Vec::new();
    r.write_trace_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("t,u_0,value\n0.0,1.0,4.0\n"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_passage_is_monotone(alpha in 0.3f64..1.8, u0 in -2.0f64..2.5) {
        let q = make_quadratic(3.0);
        let stop = StoppingRule::horizon(Metric::DistanceToOptimum, 15.0).with_thresholds(vec![0.5, 0.1, 0.01, 0.001]);
        let r = run_fctm(&q, &[u0], &fctm_cfg(alpha, 0.01), &stop).unwrap();
        let mut last = 0.0;
        let mut missing = false;
        for p in &r.first_passage {
            match p.time {
                Some(t) => {
                    prop_assert!(!missing && t >= last);
                    last = t;
                }
                None => missing = true,
            }
        }
        prop_assert_eq!(r.final_metric, *r.metrics.last().unwrap());
    }
}
