//! Initial-value problems D^α_t u = F(u) for time-autonomous vector fields.
//!
//! [`solve_pece`] is the full-memory fractional Adams–Bashforth–Moulton scheme on a
//! uniform grid (one corrector pass per step). [`solve_reference_ode`] is an adaptive
//! Dormand–Prince 5(4) integrator for the classical case α = 1, used as the
//! integer-order baseline.

mod pece;
mod rk45;

use std::io::Write;

pub use crate::order::FractionalOrder;
pub use pece::{solve_pece, solve_pece_observed};
pub use rk45::{solve_reference_ode, solve_reference_ode_observed, ReferenceOptions};

use crate::error::{Error, Result};

/// Right-hand side F(u) writing into `out`.
pub trait VectorField {
    fn eval(&self, u: &[f64], out: &mut [f64]) -> Result<()>;
}

impl<F> VectorField for F
where
    F: Fn(&[f64], &mut [f64]) -> Result<()>,
{
    fn eval(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        self(u, out)
    }
}

/// A Caputo initial-value problem D^α_t u = F(u) on [0, t_end].
#[derive(Debug, Clone)]
pub struct FdeProblem<F> {
    pub alpha: FractionalOrder,
    pub u0: Vec<f64>,
    /// u′(0); required exactly when α > 1.
    pub v0: Option<Vec<f64>>,
    pub t_end: f64,
    pub h: f64,
    pub field: F,
}

impl<F: VectorField> FdeProblem<F> {
    pub fn new(alpha: FractionalOrder, u0: Vec<f64>, t_end: f64, h: f64, field: F) -> Self {
        FdeProblem { alpha, u0, v0: None, t_end, h, field }
    }

    pub fn with_initial_velocity(mut self, v0: Vec<f64>) -> Self {
        self.v0 = Some(v0);
        self
    }

    pub fn dimension(&self) -> usize {
        self.u0.len()
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.alpha.value();
        if !(a > 0.0 && a <= 2.0) {
            return Err(Error::config(format!("solver order must lie in (0, 2], got {a}")));
        }
        if self.u0.is_empty() {
            return Err(Error::config("state dimension must be at least 1"));
        }
        if self.u0.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("initial state must be finite"));
        }
        match (&self.v0, a > 1.0) {
            (None, true) => {
                return Err(Error::config(format!("alpha = {a} > 1 requires an initial velocity")))
            }
            (Some(_), false) => {
                return Err(Error::config(format!(
                    "alpha = {a} <= 1 takes a single initial condition; drop the initial velocity"
                )))
            }
            (Some(v), true) if v.len() != self.u0.len() => {
                return Err(Error::config("initial velocity dimension mismatch"))
            }
            _ => {}
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::config("t_end must be positive and finite"));
        }
        if !(self.h > 0.0) || self.h >= self.t_end {
            return Err(Error::config(format!("step h = {} must satisfy 0 < h < t_end", self.h)));
        }
        Ok(())
    }

    /// Evaluates F(u0) and checks it is finite.
    pub(crate) fn initial_slope(&self) -> Result<Vec<f64>> {
        let mut f0 = vec![0.0; self.u0.len()];
        self.field.eval(&self.u0, &mut f0)?;
        if f0.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("field is not finite at the initial state"));
        }
        Ok(f0)
    }
}

/// Work counters of a solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub steps: usize,
    pub corrector_iterations: usize,
    pub field_evaluations: usize,
    pub rejected_steps: usize,
    /// The observer requested an early stop before t_end.
    pub stopped_early: bool,
}

/// Discretized solution path.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: SolverStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().map_or(&[], Vec::as_slice)
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Scalar component `i` along the path.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }

    /// Writes `t,u_0,...,u_{d-1}` with one row per grid point.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((0..self.dimension()).map(|i| format!("u_{i}")));
        w.write_record(&header)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut row = Vec::with_capacity(s.len() + 1);
            row.push(format_real(*t));
            row.extend(s.iter().map(|x| format_real(*x)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip decimal representation.
pub fn format_real(x: f64) -> String {
    format!("{x:?}")
}
