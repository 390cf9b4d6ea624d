//! Shared fixtures for the kernel benchmarks.

use fracopt::problems::random_sphere_configuration;
use fracopt::{FdeProblem, FractionalOrder, Result};

/// `D^α u = -2(u - 3)` from `u(0) = 1`, with zero initial velocity when α > 1.
pub fn linear_relaxation(
    alpha: f64,
    t_end: f64,
    h: f64,
) -> FdeProblem<impl Fn(&[f64], &mut [f64]) -> Result<()> + Sync> {
    let field = |u: &[f64], out: &mut [f64]| {
        out[0] = -2.0 * (u[0] - 3.0);
        Ok(())
    };
    let p = FdeProblem::new(FractionalOrder::new(alpha).unwrap(), vec![1.0], t_end, h, field);
    if alpha > 1.0 {
        p.with_initial_velocity(vec![0.0])
    } else {
        p
    }
}

/// Seeded Thomson configuration with `n` charges.
pub fn sphere_state(n: usize) -> Vec<f64> {
    random_sphere_configuration(n, 7).unwrap()
}
