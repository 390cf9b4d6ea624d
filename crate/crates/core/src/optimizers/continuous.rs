use std::ops::ControlFlow;
use std::time::Instant;

use super::{Cost, Monitor, OptimizerConfig, RunResult, StoppingRule, Trace};
use crate::error::{Error, Result};
use crate::fdesolve::{solve_pece_observed, solve_reference_ode_observed, FdeProblem, FractionalOrder, ReferenceOptions};
use crate::problems::Objective;

/// Integrates the gradient flow D^α_t u = -λ ∇f(u): FCTM through the fractional
/// predictor-corrector, CGM through the adaptive Runge–Kutta reference solver.
pub fn run_fctm(objective: &dyn Objective, u0: &[f64], cfg: &OptimizerConfig, stop: &StoppingRule) -> Result<RunResult> {
    cfg.validate()?;
    if u0.len() != objective.dimension() {
        return Err(Error::config("initial point dimension mismatch"));
    }
    let t_end = stop.t_end.ok_or_else(|| Error::config("continuous methods need t_end"))?;
    let lambda = cfg.gain();
    let field = move |u: &[f64], out: &mut [f64]| -> Result<()> {
        objective.gradient(u, out)?;
        for x in out.iter_mut() {
            *x *= -lambda;
        }
        Ok(())
    };

    let started = Instant::now();
    let mut monitor = Monitor::new(objective, stop)?;
    let mut failure = None;
    let max_steps = stop.max_iter.unwrap_or(usize::MAX);
    let mut seen = 0usize;
    let mut observer = |t: f64, u: &[f64]| {
        let done = match monitor.observe(t, u) {
            Ok(d) => d,
            Err(e) => {
                failure = Some(e);
                true
            }
        };
        seen += 1;
        if done || seen > max_steps {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    };

    let trajectory = match cfg {
        OptimizerConfig::Fctm { alpha, h, v0, .. } => {
            let mut problem = FdeProblem::new(*alpha, u0.to_vec(), t_end, *h, field);
            if alpha.value() > 1.0 {
                problem = problem.with_initial_velocity(v0.clone().unwrap_or_else(|| vec![0.0; u0.len()]));
            }
            solve_pece_observed(&problem, &mut observer)?
        }
        OptimizerConfig::Cgm { h, rel_tol, abs_tol, max_step, .. } => {
            let problem = FdeProblem::new(FractionalOrder::ONE, u0.to_vec(), t_end, *h, field);
            let opts = ReferenceOptions { rel_tol: *rel_tol, abs_tol: *abs_tol, max_step: *max_step, max_steps: 10_000_000 };
            solve_reference_ode_observed(&problem, &opts, &mut observer)?
        }
        _ => return Err(Error::config(format!("run_fctm called with {}", cfg.label()))),
    };
    if let Some(e) = failure {
        return Err(e);
    }
    let cost = Cost {
        steps: trajectory.stats.steps,
        field_evaluations: trajectory.stats.field_evaluations,
        wall_time: started.elapsed(),
    };
    Ok(monitor.finish(cfg.label(), Trace::Continuous(trajectory), cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::Metric;
    use crate::problems::make_quadratic;

    #[test]
    fn cgm_follows_exponential_decay() {
        let q = make_quadratic(3.0);
        let stop = StoppingRule::horizon(Metric::DistanceToOptimum, 1.0);
        let r = run_fctm(&q, &[1.0], &OptimizerConfig::cgm(1.0, 1e-3), &stop).unwrap();
        assert!((r.converged_to[0] - (3.0 - 2.0 * (-2.0f64).exp())).abs() < 1e-7);
    }

    #[test]
    fn stop_below_ends_run_early() {
        let q = make_quadratic(3.0);
        let stop = StoppingRule::horizon(Metric::DistanceToOptimum, 50.0).with_stop_below(1e-2);
        let cfg = OptimizerConfig::fctm(FractionalOrder::new(0.9).unwrap(), 1.0, 1e-2);
        let r = run_fctm(&q, &[1.0], &cfg, &stop).unwrap();
        assert!(r.converged);
        assert!(r.final_metric < 1e-2);
        assert!(r.trace.times().last().unwrap() < &50.0);
    }

    #[test]
    fn missing_horizon_is_a_config_error() {
        let q = make_quadratic(3.0);
        let stop = StoppingRule::iterations(Metric::DistanceToOptimum, 10);
        let cfg = OptimizerConfig::fctm(FractionalOrder::new(0.9).unwrap(), 1.0, 1e-2);
        assert!(matches!(run_fctm(&q, &[1.0], &cfg, &stop), Err(Error::Config(_))));
    }
}
