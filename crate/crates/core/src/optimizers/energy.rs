use std::io::Write;

use crate::error::{Error, Result};
use crate::fdesolve::{format_real, FractionalOrder, Trajectory};
use crate::specfun::{mittag_leffler, MlSeriesConfig};

/// Absolute slack allowed above the Mittag-Leffler envelope.
const ENVELOPE_SLACK: f64 = 1e-6;

/// Lyapunov energy V(t) = ‖u(t) - u*‖² along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    /// Strong-convexity constant used by the envelope.
    pub eta: f64,
}

impl EnergyTrace {
    pub fn is_nonincreasing(&self) -> bool {
        self.energy.windows(2).all(|w| w[1] <= w[0])
    }

    /// Writes `t,V`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "V"])?;
        for (t, v) in self.times.iter().zip(&self.energy) {
            w.write_record([format_real(*t), format_real(*v)])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn energy_trace(trace: &Trajectory, u_star: &[f64], eta: f64) -> EnergyTrace {
    let energy = trace
        .states
        .iter()
        .map(|s| s.iter().zip(u_star).map(|(a, b)| (a - b) * (a - b)).sum())
        .collect();
    EnergyTrace { times: trace.times.clone(), energy, eta }
}

/// Outcome of [`stability_envelope_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeCheck {
    pub energy: EnergyTrace,
    /// V(0) E_{α,1}(-η t^α) at each grid point.
    pub envelope: Vec<f64>,
    /// max_t [V(t) - envelope(t)]
    pub max_excess: f64,
    pub passed: bool,
}

/// Verifies V(t) ≤ V(0) E_{α,1}(-η t^α) + 1e-6 at every grid point (0 < α ≤ 1).
pub fn stability_envelope_check(
    trace: &Trajectory,
    u_star: &[f64],
    eta: f64,
    alpha: FractionalOrder,
) -> Result<EnvelopeCheck> {
    let a = alpha.value();
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Scope(format!("the Mittag-Leffler envelope applies for 0 < alpha <= 1, got {a}")));
    }
    if !(eta > 0.0) {
        return Err(Error::config("eta must be positive"));
    }
    let energy = energy_trace(trace, u_star, eta);
    let v0 = energy.energy.first().copied().unwrap_or(0.0);
    let cfg = MlSeriesConfig::default();
    let mut envelope = Vec::with_capacity(energy.times.len());
    let mut max_excess = f64::NEG_INFINITY;
    for (&t, &v) in energy.times.iter().zip(&energy.energy) {
        let bound = if v0 == 0.0 { 0.0 } else { v0 * mittag_leffler(alpha, 1.0, -eta * t.powf(a), &cfg)? };
        max_excess = max_excess.max(v - bound);
        envelope.push(bound);
    }
    Ok(EnvelopeCheck { passed: max_excess <= ENVELOPE_SLACK, energy, envelope, max_excess })
}

/// Number of strict local minima of V over the grid.
pub fn oscillation_census(energy: &EnergyTrace) -> usize {
    energy.energy.windows(3).filter(|w| w[1] < w[0] && w[1] < w[2]).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdesolve::SolverStats;

    fn trajectory(values: &[f64]) -> Trajectory {
        Trajectory {
            times: (0..values.len()).map(|k| k as f64 * 0.1).collect(),
            states: values.iter().map(|v| vec![*v]).collect(),
            stats: SolverStats::default(),
        }
    }

    #[test]
    fn constant_energy_has_no_oscillation() {
        let e = energy_trace(&trajectory(&[2.0; 10]), &[0.0], 2.0);
        assert_eq!(oscillation_census(&e), 0);
    }

    #[test]
    fn census_counts_strict_minima() {
        let e = energy_trace(&trajectory(&[3.0, 1.0, 2.0, 0.5, 0.5, 1.0]), &[0.0], 2.0);
        // V = u²: 9, 1, 4, 0.25, 0.25, 1 -> one strict minimum (plateau excluded)
        assert_eq!(oscillation_census(&e), 1);
    }

    #[test]
    fn envelope_rejects_orders_above_one() {
        let t = trajectory(&[1.0, 2.0]);
        let err = stability_envelope_check(&t, &[3.0], 2.0, FractionalOrder::new(1.5).unwrap());
        assert!(matches!(err, Err(Error::Scope(_))));
    }

    #[test]
    fn equilibrium_start_passes_trivially() {
        let t = trajectory(&[3.0; 5]);
        let c = stability_envelope_check(&t, &[3.0], 2.0, FractionalOrder::new(0.7).unwrap()).unwrap();
        assert!(c.passed);
        assert!(c.energy.energy.iter().all(|v| *v == 0.0));
    }
}
