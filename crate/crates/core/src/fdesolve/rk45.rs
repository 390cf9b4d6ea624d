use std::ops::ControlFlow;

use super::{FdeProblem, SolverStats, Trajectory, VectorField};
use crate::error::{Error, Result};

/// Tolerances and step limits for the adaptive reference solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl ReferenceOptions {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        ReferenceOptions { rel_tol, abs_tol, max_step: f64::INFINITY, max_steps: 10_000_000 }
    }
}

// Dormand–Prince 5(4) tableau; the field is autonomous so the nodes c_i are not needed
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// difference between the 5th- and 4th-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive Dormand–Prince integration of du/dt = F(u). The problem's `h` is the
/// initial step guess.
pub fn solve_reference_ode<F: VectorField>(
    problem: &FdeProblem<F>,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Trajectory> {
    solve_reference_ode_observed(problem, &ReferenceOptions::new(rel_tol, abs_tol), |_, _| {
        ControlFlow::Continue(())
    })
}

pub fn solve_reference_ode_observed<F, O>(
    problem: &FdeProblem<F>,
    opts: &ReferenceOptions,
    mut observer: O,
) -> Result<Trajectory>
where
    F: VectorField,
    O: FnMut(f64, &[f64]) -> ControlFlow<()>,
{
    if problem.alpha.value() != 1.0 {
        return Err(Error::config(format!(
            "reference solver integrates classical ODEs only (alpha = {})",
            problem.alpha
        )));
    }
    problem.validate()?;
    if !(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0) || !(opts.max_step > 0.0) {
        return Err(Error::config("tolerances and max_step must be positive"));
    }

    let d = problem.dimension();
    let t_end = problem.t_end;
    let mut stats = SolverStats::default();
    let mut times = vec![0.0];
    let mut states = vec![problem.u0.clone()];
    if observer(0.0, &problem.u0).is_break() {
        stats.stopped_early = true;
        return Ok(Trajectory { times, states, stats });
    }

    let mut k = vec![vec![0.0; d]; 7];
    k[0] = problem.initial_slope()?;
    stats.field_evaluations += 1;

    let mut t = 0.0;
    let mut u = problem.u0.clone();
    let mut h = problem.h.min(opts.max_step);
    let mut stage = vec![0.0; d];
    let mut u_new = vec![0.0; d];
    let mut last_rejected = false;

    while t < t_end {
        if stats.steps + stats.rejected_steps >= opts.max_steps {
            return Err(Error::Stiffness { t, h });
        }
        let finishing = t + h >= t_end;
        if finishing {
            h = t_end - t;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::Stiffness { t, h });
        }

        for s in 1..7 {
            for i in 0..d {
                let mut acc = u[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                stage[i] = acc;
            }
            if s == 6 {
                u_new.copy_from_slice(&stage);
            }
            problem.field.eval(&stage, &mut k[s])?;
            stats.field_evaluations += 1;
        }

        let mut err = 0.0;
        for i in 0..d {
            let e: f64 = h * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
            let scale = opts.abs_tol + opts.rel_tol * u[i].abs().max(u_new[i].abs());
            err += (e / scale).powi(2);
        }
        let err = (err / d as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Divergence { at: t + h });
        }

        if err <= 1.0 {
            t = if finishing { t_end } else { t + h };
            u.copy_from_slice(&u_new);
            // first-same-as-last
            let last = k[6].clone();
            k[0] = last;
            stats.steps += 1;
            let stop = observer(t, &u).is_break();
            times.push(t);
            states.push(u.clone());
            if stop {
                stats.stopped_early = t < t_end;
                break;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * if last_rejected { factor.min(1.0) } else { factor }).min(opts.max_step);
            last_rejected = false;
        } else {
            stats.rejected_steps += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            last_rejected = true;
        }
    }
    Ok(Trajectory { times, states, stats })
}
