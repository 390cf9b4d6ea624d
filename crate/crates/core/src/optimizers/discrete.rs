use std::time::Instant;

use super::{Cost, IterationTrace, Monitor, OptimizerConfig, RunResult, StoppingRule, Trace};
use crate::error::{Error, Result};
use crate::fdesolve::FractionalOrder;
use crate::fracops::{gl_derivative, poly_derivative, FractionalOperator, MemoryWindow};
use crate::problems::Objective;

fn iteration_budget(stop: &StoppingRule) -> Result<usize> {
    stop.max_iter.ok_or_else(|| Error::config("discrete methods need max_iter"))
}

/// Gradient descent u_{k+1} = u_k - ω ∇f(u_k).
pub fn run_gdm(objective: &dyn Objective, u0: &[f64], cfg: &OptimizerConfig, stop: &StoppingRule) -> Result<RunResult> {
    let OptimizerConfig::Gdm { omega } = *cfg else {
        return Err(Error::config(format!("run_gdm called with {}", cfg.label())));
    };
    cfg.validate()?;
    if u0.len() != objective.dimension() {
        return Err(Error::config("initial point dimension mismatch"));
    }
    let max_iter = iteration_budget(stop)?;
    let started = Instant::now();
    let mut monitor = Monitor::new(objective, stop)?;
    let mut trace = IterationTrace::default();
    let mut cost = Cost::default();

    let mut u = u0.to_vec();
    let mut g = vec![0.0; u.len()];
    trace.values.push(objective.value(&u)?);
    trace.states.push(u.clone());
    let mut done = monitor.observe(0.0, &u)?;
    let mut k = 0;
    while !done && k < max_iter {
        objective.gradient(&u, &mut g)?;
        cost.field_evaluations += 1;
        for (x, gi) in u.iter_mut().zip(&g) {
            *x -= omega * gi;
        }
        k += 1;
        let f = objective.value(&u)?;
        if !f.is_finite() || u.iter().any(|x| !x.is_finite()) {
            return Err(Error::Divergence { at: k as f64 });
        }
        trace.values.push(f);
        trace.states.push(u.clone());
        done = monitor.observe(k as f64, &u)?;
    }
    cost.steps = k;
    cost.wall_time = started.elapsed();
    Ok(monitor.finish(cfg.label(), Trace::Discrete(trace), cost))
}

/// D^α f(u) for a scalar objective, in closed form when the objective is a polynomial
/// and by the Grünwald–Letnikov sum otherwise.
///
/// The sampled Caputo derivative subtracts the Taylor polynomial of degree ⌈α⌉-1 at the
/// effective lower limit before applying the sum (supported for α < 2).
pub fn fractional_slope(
    objective: &dyn Objective,
    operator: FractionalOperator,
    alpha: FractionalOrder,
    window: &MemoryWindow,
    u: f64,
) -> Result<f64> {
    if let Some(p) = objective.scalar_polynomial() {
        return poly_derivative(operator, p, alpha, u, window);
    }
    let f = |x: f64| objective.value(&[x]).unwrap_or(f64::NAN);
    match operator {
        FractionalOperator::RiemannLiouville => gl_derivative(f, alpha, u, window),
        FractionalOperator::Caputo => {
            let a = window.effective_lower_limit(u);
            let fa = objective.value(&[a])?;
            let al = alpha.value();
            if al <= 1.0 {
                gl_derivative(|x| f(x) - fa, alpha, u, window)
            } else if al < 2.0 {
                let ga = objective.gradient_vec(&[a])?[0];
                gl_derivative(|x| f(x) - fa - ga * (x - a), alpha, u, window)
            } else {
                Err(Error::Scope(format!("sampled Caputo slope needs alpha < 2, got {al}")))
            }
        }
    }
}

/// Fractional-gradient descent u_{k+1} = u_k - ω D^α f(u_k) on a scalar objective.
pub fn run_fgdm(objective: &dyn Objective, u0: f64, cfg: &OptimizerConfig, stop: &StoppingRule) -> Result<RunResult> {
    let OptimizerConfig::Fgdm { alpha, omega, operator, window } = cfg else {
        return Err(Error::config(format!("run_fgdm called with {}", cfg.label())));
    };
    cfg.validate()?;
    if objective.dimension() != 1 {
        return Err(Error::Scope("FGDM is defined for scalar objectives only".into()));
    }
    let max_iter = iteration_budget(stop)?;
    let started = Instant::now();
    let mut monitor = Monitor::new(objective, stop)?;
    let mut trace = IterationTrace::default();
    let mut cost = Cost::default();

    let mut u = u0;
    trace.values.push(objective.value(&[u])?);
    trace.states.push(vec![u]);
    let mut done = monitor.observe(0.0, &[u])?;
    let mut k = 0;
    while !done && k < max_iter {
        let slope = fractional_slope(objective, *operator, *alpha, window, u)?;
        cost.field_evaluations += 1;
        u -= omega * slope;
        k += 1;
        let f = objective.value(&[u])?;
        if !u.is_finite() || !f.is_finite() {
            return Err(Error::Divergence { at: k as f64 });
        }
        trace.values.push(f);
        trace.states.push(vec![u]);
        done = monitor.observe(k as f64, &[u])?;
    }
    cost.steps = k;
    cost.wall_time = started.elapsed();
    Ok(monitor.finish(cfg.label(), Trace::Discrete(trace), cost))
}
