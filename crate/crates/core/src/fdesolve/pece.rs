use std::ops::ControlFlow;

use super::{FdeProblem, SolverStats, Trajectory, VectorField};
use crate::error::{Error, Result};
use crate::specfun::gamma;

/// Solves the problem on the uniform grid t_n = n h up to t_end.
pub fn solve_pece<F: VectorField>(problem: &FdeProblem<F>) -> Result<Trajectory> {
    solve_pece_observed(problem, |_, _| ControlFlow::Continue(()))
}

/// Like [`solve_pece`], calling `observer(t, u)` after every grid point (including
/// t = 0). Returning `Break` ends the integration early.
pub fn solve_pece_observed<F, O>(problem: &FdeProblem<F>, mut observer: O) -> Result<Trajectory>
where
    F: VectorField,
    O: FnMut(f64, &[f64]) -> ControlFlow<()>,
{
    problem.validate()?;
    let d = problem.dimension();
    let h = problem.h;
    let steps = ((problem.t_end / h) - 1e-9).ceil() as usize;
    let weights = AbmWeights::new(problem.alpha.value(), steps);
    let a = problem.alpha.value();
    let pred_scale = h.powf(a) / gamma(a + 1.0)?;
    let corr_scale = h.powf(a) / gamma(a + 2.0)?;

    let mut stats = SolverStats::default();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    // history of F(u_j), row-major
    let mut slopes = Vec::with_capacity((steps + 1) * d);

    slopes.extend(problem.initial_slope()?);
    stats.field_evaluations += 1;
    times.push(0.0);
    states.push(problem.u0.clone());
    if observer(0.0, &problem.u0).is_break() {
        stats.stopped_early = true;
        return Ok(Trajectory { times, states, stats });
    }

    let mut taylor = vec![0.0; d];
    let mut pred = vec![0.0; d];
    let mut corr = vec![0.0; d];
    let mut u_pred = vec![0.0; d];
    let mut f_pred = vec![0.0; d];
    for n in 0..steps {
        let t_next = (n + 1) as f64 * h;
        taylor.copy_from_slice(&problem.u0);
        if let Some(v0) = &problem.v0 {
            for (x, v) in taylor.iter_mut().zip(v0) {
                *x += t_next * v;
            }
        }

        pred.fill(0.0);
        let a0 = weights.first_corrector(n);
        for (c, f) in corr.iter_mut().zip(&slopes[..d]) {
            *c = a0 * f;
        }
        let b = weights.predictor(n, 0);
        for (p, f) in pred.iter_mut().zip(&slopes[..d]) {
            *p = b * f;
        }
        for j in 1..=n {
            let b = weights.predictor(n, j);
            let c = weights.corrector(n, j);
            let f = &slopes[j * d..(j + 1) * d];
            for i in 0..d {
                pred[i] += b * f[i];
                corr[i] += c * f[i];
            }
        }

        for i in 0..d {
            u_pred[i] = taylor[i] + pred_scale * pred[i];
        }
        problem.field.eval(&u_pred, &mut f_pred)?;
        stats.field_evaluations += 1;

        let mut u_next = vec![0.0; d];
        for i in 0..d {
            u_next[i] = taylor[i] + corr_scale * (f_pred[i] + corr[i]);
        }
        stats.steps += 1;
        stats.corrector_iterations += 1;
        if u_next.iter().any(|x| !x.is_finite()) {
            return Err(Error::Divergence { at: t_next });
        }

        let start = slopes.len();
        slopes.resize(start + d, 0.0);
        problem.field.eval(&u_next, &mut slopes[start..])?;
        stats.field_evaluations += 1;

        let stop = observer(t_next, &u_next).is_break();
        times.push(t_next);
        states.push(u_next);
        if stop {
            stats.stopped_early = n + 1 < steps;
            break;
        }
    }
    Ok(Trajectory { times, states, stats })
}

/// Product-integration weights of the fractional Adams scheme.
///
/// Predictor: b_k = (k+1)^α - k^α. Corrector: c_k = (k+2)^{α+1} + k^{α+1} - 2(k+1)^{α+1},
/// with the special first weight n^{α+1} - (n-α)(n+1)^α.
struct AbmWeights {
    alpha: f64,
    pred: Vec<f64>,
    corr: Vec<f64>,
}

impl AbmWeights {
    fn new(alpha: f64, steps: usize) -> Self {
        let pred = (0..=steps).map(|k| first_difference(k, alpha)).collect();
        let corr = (0..=steps).map(|k| second_difference(k, alpha + 1.0)).collect();
        AbmWeights { alpha, pred, corr }
    }

    /// Weight of F(u_j) in the predictor for u_{n+1}.
    #[inline]
    fn predictor(&self, n: usize, j: usize) -> f64 {
        self.pred[n - j]
    }

    /// Weight of F(u_j), 1 ≤ j ≤ n, in the corrector for u_{n+1}.
    #[inline]
    fn corrector(&self, n: usize, j: usize) -> f64 {
        self.corr[n - j]
    }

    /// Weight of F(u_0) in the corrector for u_{n+1}.
    fn first_corrector(&self, n: usize) -> f64 {
        let nf = n as f64;
        let a = self.alpha;
        if n == 0 {
            return a;
        }
        nf.powf(a + 1.0) - (nf - a) * (nf + 1.0).powf(a)
    }
}

/// (k+1)^p - k^p without cancellation for large k.
fn first_difference(k: usize, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let kf = k as f64;
    kf.powf(p) * (p * (1.0 / kf).ln_1p()).exp_m1()
}

/// (k+2)^p + k^p - 2(k+1)^p without cancellation for large k.
fn second_difference(k: usize, p: f64) -> f64 {
    let m = (k + 1) as f64;
    if m < 16.0 {
        return (m + 1.0).powf(p) + (m - 1.0).powf(p) - 2.0 * m.powf(p);
    }
    // m^p [(1+x)^p + (1-x)^p - 2] = 2 m^p Σ_{j even ≥ 2} C(p, j) x^j, x = 1/m
    let x2 = 1.0 / (m * m);
    let mut binom = p * (p - 1.0) / 2.0;
    let mut xp = x2;
    let mut sum = binom * xp;
    let mut j = 2.0;
    loop {
        binom *= (p - j) * (p - j - 1.0) / ((j + 1.0) * (j + 2.0));
        xp *= x2;
        let term = binom * xp;
        sum += term;
        j += 2.0;
        if term.abs() <= 1e-17 * sum.abs() || binom == 0.0 {
            break;
        }
    }
    2.0 * m.powf(p) * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdesolve::FractionalOrder;

    #[test]
    fn weight_differences_match_direct_formula() {
        for p in [0.3, 1.0, 1.5, 2.2, 2.7] {
            for k in [0usize, 1, 5, 15, 16, 40] {
                let kf = k as f64;
                let direct1 = (kf + 1.0).powf(p) - kf.powf(p);
                assert!((first_difference(k, p) - direct1).abs() <= 1e-12 * direct1.abs().max(1.0));
                let direct2 = (kf + 2.0).powf(p) + kf.powf(p) - 2.0 * (kf + 1.0).powf(p);
                assert!(
                    (second_difference(k, p) - direct2).abs() <= 1e-10 * direct2.abs().max(1.0),
                    "p={p} k={k}: {} vs {direct2}",
                    second_difference(k, p)
                );
            }
        }
    }

    #[test]
    fn integer_order_reduces_to_trapezoid_weights() {
        let w = AbmWeights::new(1.0, 10);
        assert!(w.pred.iter().all(|&b| (b - 1.0).abs() < 1e-15));
        assert!(w.corr.iter().all(|&c| (c - 2.0).abs() < 1e-12));
        assert_eq!(w.first_corrector(5), 1.0);
    }

    #[test]
    fn field_evaluation_count() {
        let field = |u: &[f64], out: &mut [f64]| {
            out[0] = -u[0];
            Ok(())
        };
        let p = FdeProblem::new(FractionalOrder::new(0.7).unwrap(), vec![1.0], 1.0, 0.01, field);
        let traj = solve_pece(&p).unwrap();
        assert_eq!(traj.stats.steps, 100);
        assert_eq!(traj.stats.field_evaluations, 1 + 2 * 100);
        assert_eq!(traj.len(), 101);
    }

    #[test]
    fn divergence_is_reported_with_time() {
        let field = |u: &[f64], out: &mut [f64]| {
            out[0] = u[0] * u[0];
            Ok(())
        };
        let p = FdeProblem::new(FractionalOrder::new(0.9).unwrap(), vec![1.0], 50.0, 0.1, field);
        match solve_pece(&p) {
            Err(Error::Divergence { at }) => assert!(at > 0.0 && at < 50.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
