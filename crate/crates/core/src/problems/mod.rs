//! Benchmark objectives with analytic gradients.

mod thomson;
mod vandermonde;

pub use thomson::{make_thomson, random_sphere_configuration, thomson_reference_energy, Thomson, ThomsonSpec};
pub use vandermonde::{make_vandermonde, CoefficientSource, NodeRule, Vandermonde, VandermondeSpec};

use crate::error::Result;
use crate::fracops::Polynomial;

/// A differentiable cost f(u) over a fixed-dimension state vector.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    fn value(&self, u: &[f64]) -> Result<f64>;

    /// Writes ∇f(u) into `out` (length [`dimension`](Objective::dimension)).
    fn gradient(&self, u: &[f64], out: &mut [f64]) -> Result<()>;

    fn known_optimum(&self) -> Option<&[f64]> {
        None
    }

    fn known_minimum(&self) -> Option<f64> {
        None
    }

    /// Closed form of a scalar polynomial objective, if it has one.
    fn scalar_polynomial(&self) -> Option<&Polynomial> {
        None
    }

    fn gradient_vec(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut g = vec![0.0; self.dimension()];
        self.gradient(u, &mut g)?;
        Ok(g)
    }
}

/// Central-difference gradient with step `step` in every coordinate.
pub fn finite_difference_gradient(objective: &dyn Objective, u: &[f64], step: f64) -> Result<Vec<f64>> {
    let mut x = u.to_vec();
    let mut g = Vec::with_capacity(u.len());
    for i in 0..u.len() {
        x[i] = u[i] + step;
        let up = objective.value(&x)?;
        x[i] = u[i] - step;
        let down = objective.value(&x)?;
        x[i] = u[i];
        g.push((up - down) / (2.0 * step));
    }
    Ok(g)
}

/// ‖∇f - ∇_h f‖ / ‖∇f‖ with the central-difference step h = 1e-6 (1 + ‖u‖).
///
/// Falls back to the absolute difference when the analytic gradient vanishes.
pub fn gradient_check(objective: &dyn Objective, u: &[f64]) -> Result<f64> {
    let scale = 1.0 + u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let fd = finite_difference_gradient(objective, u, 1e-6 * scale)?;
    let exact = objective.gradient_vec(u)?;
    let diff = exact.iter().zip(&fd).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let norm = exact.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok(if norm > 0.0 { diff / norm } else { diff })
}

/// f(u) = (u - c)² in one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    center: [f64; 1],
    poly: Polynomial,
}

pub fn make_quadratic(c: f64) -> Quadratic {
    Quadratic { center: [c], poly: Polynomial::shifted_square(c) }
}

impl Quadratic {
    pub fn center(&self) -> f64 {
        self.center[0]
    }
}

impl Objective for Quadratic {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn dimension(&self) -> usize {
        1
    }

    fn value(&self, u: &[f64]) -> Result<f64> {
        let d = u[0] - self.center[0];
        Ok(d * d)
    }

    fn gradient(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        out[0] = 2.0 * (u[0] - self.center[0]);
        Ok(())
    }

    fn known_optimum(&self) -> Option<&[f64]> {
        Some(&self.center)
    }

    fn known_minimum(&self) -> Option<f64> {
        Some(0.0)
    }

    fn scalar_polynomial(&self) -> Option<&Polynomial> {
        Some(&self.poly)
    }
}
