//! Descent rules: discrete gradient descent (GDM), the continuous gradient method
//! (CGM), fractional-gradient descent (FGDM) and the fractional continuous-time
//! method (FCTM), with shared stopping logic and first-passage bookkeeping.

mod continuous;
mod discrete;
mod energy;

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Duration;

pub use continuous::run_fctm;
pub use discrete::{fractional_slope, run_fgdm, run_gdm};
pub use energy::{energy_trace, oscillation_census, stability_envelope_check, EnergyTrace, EnvelopeCheck};

use crate::error::{Error, Result};
use crate::fdesolve::{format_real, FractionalOrder, Trajectory};
use crate::fracops::{FractionalOperator, MemoryWindow};
use crate::problems::Objective;

/// The four descent rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Gdm,
    Cgm,
    Fgdm,
    Fctm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Gdm => "GDM",
            Method::Cgm => "CGM",
            Method::Fgdm => "FGDM",
            Method::Fctm => "FCTM",
        }
    }

    pub fn is_continuous(self) -> bool {
        matches!(self, Method::Cgm | Method::Fctm)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GDM" => Ok(Method::Gdm),
            "CGM" => Ok(Method::Cgm),
            "FGDM" => Ok(Method::Fgdm),
            "FCTM" => Ok(Method::Fctm),
            _ => Err(Error::config(format!("unknown method {s:?}"))),
        }
    }
}

/// A descent rule together with its gains.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerConfig {
    /// u_{k+1} = u_k - ω ∇f(u_k)
    Gdm { omega: f64 },
    /// du/dt = -λ ∇f(u), integrated adaptively; `h` is the initial step.
    Cgm { lambda: f64, h: f64, rel_tol: f64, abs_tol: f64, max_step: f64 },
    /// u_{k+1} = u_k - ω D^α f(u_k) for scalar objectives.
    Fgdm { alpha: FractionalOrder, omega: f64, operator: FractionalOperator, window: MemoryWindow },
    /// D^α_t u = -λ ∇f(u) on a uniform grid of width `h`. `v0` defaults to zero for α > 1.
    Fctm { alpha: FractionalOrder, lambda: f64, h: f64, v0: Option<Vec<f64>> },
}

impl OptimizerConfig {
    pub fn gdm(omega: f64) -> Self {
        OptimizerConfig::Gdm { omega }
    }

    pub fn cgm(lambda: f64, h: f64) -> Self {
        OptimizerConfig::Cgm { lambda, h, rel_tol: 1e-8, abs_tol: 1e-10, max_step: f64::INFINITY }
    }

    pub fn fgdm(alpha: FractionalOrder, omega: f64, operator: FractionalOperator, window: MemoryWindow) -> Self {
        OptimizerConfig::Fgdm { alpha, omega, operator, window }
    }

    pub fn fctm(alpha: FractionalOrder, lambda: f64, h: f64) -> Self {
        OptimizerConfig::Fctm { alpha, lambda, h, v0: None }
    }

    pub fn method(&self) -> Method {
        match self {
            OptimizerConfig::Gdm { .. } => Method::Gdm,
            OptimizerConfig::Cgm { .. } => Method::Cgm,
            OptimizerConfig::Fgdm { .. } => Method::Fgdm,
            OptimizerConfig::Fctm { .. } => Method::Fctm,
        }
    }

    pub fn alpha(&self) -> FractionalOrder {
        match self {
            OptimizerConfig::Fgdm { alpha, .. } | OptimizerConfig::Fctm { alpha, .. } => *alpha,
            _ => FractionalOrder::ONE,
        }
    }

    /// ω for discrete rules, λ for continuous ones.
    pub fn gain(&self) -> f64 {
        match self {
            OptimizerConfig::Gdm { omega } | OptimizerConfig::Fgdm { omega, .. } => *omega,
            OptimizerConfig::Cgm { lambda, .. } | OptimizerConfig::Fctm { lambda, .. } => *lambda,
        }
    }

    /// Short identifier such as `FCTM(alpha=0.7)`, `FCTM(alpha=1.5,v0=0.5)` or
    /// `FGDM-Caputo(alpha=0.9)`.
    pub fn label(&self) -> String {
        match self {
            OptimizerConfig::Fgdm { alpha, operator, window, .. } => {
                let mem = if window.is_fixed() { String::new() } else { format!(",L={}", window.memory_length) };
                format!("FGDM-{}(alpha={alpha}{mem})", operator.name())
            }
            OptimizerConfig::Fctm { alpha, v0: None, .. } => format!("FCTM(alpha={alpha})"),
            OptimizerConfig::Fctm { alpha, v0: Some(v), .. } => {
                let v = v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
                format!("FCTM(alpha={alpha},v0={v})")
            }
            other => other.method().name().to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive and finite, got {x}")))
            }
        };
        match self {
            OptimizerConfig::Gdm { omega } => positive("omega", *omega),
            OptimizerConfig::Cgm { lambda, h, rel_tol, abs_tol, max_step } => {
                positive("lambda", *lambda)?;
                positive("h", *h)?;
                positive("rel_tol", *rel_tol)?;
                positive("abs_tol", *abs_tol)?;
                if !(*max_step > 0.0) {
                    return Err(Error::config("max_step must be positive"));
                }
                Ok(())
            }
            OptimizerConfig::Fgdm { alpha, omega, window, .. } => {
                positive("omega", *omega)?;
                if alpha.value() <= 0.0 {
                    return Err(Error::config("FGDM needs alpha > 0"));
                }
                window.validate()
            }
            OptimizerConfig::Fctm { alpha, lambda, h, v0 } => {
                positive("lambda", *lambda)?;
                positive("h", *h)?;
                let a = alpha.value();
                if !(a > 0.0 && a <= 2.0) {
                    return Err(Error::config(format!("FCTM needs 0 < alpha <= 2, got {a}")));
                }
                if v0.is_some() && a <= 1.0 {
                    return Err(Error::config("an initial velocity only applies when alpha > 1"));
                }
                Ok(())
            }
        }
    }
}

/// Convergence metric monitored along a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// ‖u - u*‖
    DistanceToOptimum,
    /// f(u)
    Value,
    /// √f(u), i.e. ‖Xu - g‖ for least-squares objectives.
    ResidualNorm,
    /// f(u) - f*
    Gap,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::DistanceToOptimum => "distance",
            Metric::Value => "value",
            Metric::ResidualNorm => "residual",
            Metric::Gap => "gap",
        }
    }

    pub fn evaluate(self, objective: &dyn Objective, u: &[f64]) -> Result<f64> {
        match self {
            Metric::DistanceToOptimum => {
                let star = objective.known_optimum().ok_or_else(|| {
                    Error::config(format!("{} has no known optimum", objective.name()))
                })?;
                Ok(u.iter().zip(star).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            }
            Metric::Value => objective.value(u),
            Metric::ResidualNorm => Ok(objective.value(u)?.max(0.0).sqrt()),
            Metric::Gap => {
                let fmin = objective.known_minimum().ok_or_else(|| {
                    Error::config(format!("{} has no known minimum", objective.name()))
                })?;
                Ok(objective.value(u)? - fmin)
            }
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(Metric::DistanceToOptimum),
            "value" => Ok(Metric::Value),
            "residual" => Ok(Metric::ResidualNorm),
            "gap" => Ok(Metric::Gap),
            _ => Err(Error::config(format!("unknown metric {s:?}"))),
        }
    }
}

/// When a run ends and which first passages it records.
///
/// Continuous methods need `t_end`; discrete methods need `max_iter`. A run also ends
/// as soon as the metric drops below `stop_below`, if set.
#[derive(Debug, Clone, PartialEq)]
pub struct StoppingRule {
    pub metric: Metric,
    /// First-passage thresholds, strictly decreasing.
    pub thresholds: Vec<f64>,
    pub stop_below: Option<f64>,
    pub t_end: Option<f64>,
    pub max_iter: Option<usize>,
}

impl StoppingRule {
    pub fn horizon(metric: Metric, t_end: f64) -> Self {
        StoppingRule { metric, thresholds: Vec::new(), stop_below: None, t_end: Some(t_end), max_iter: None }
    }

    pub fn iterations(metric: Metric, max_iter: usize) -> Self {
        StoppingRule { metric, thresholds: Vec::new(), stop_below: None, t_end: None, max_iter: Some(max_iter) }
    }

    pub fn with_thresholds(mut self, thresholds: Vec<f64>) -> Self {
        self.thresholds = thresholds;
        self
    }

    pub fn with_stop_below(mut self, eps: f64) -> Self {
        self.stop_below = Some(eps);
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = Some(max_iter);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.thresholds.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::config("first-passage thresholds must be strictly decreasing"));
        }
        if self.thresholds.iter().chain(&self.stop_below).any(|e| !(*e > 0.0)) {
            return Err(Error::config("thresholds must be positive"));
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::config("t_end must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// Earliest time (or iteration) at which the metric fell below `threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstPassage {
    pub threshold: f64,
    pub time: Option<f64>,
}

/// Iterates of a discrete method.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    pub states: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

/// Path of a run: a solver trajectory or a list of iterates.
#[derive(Debug, Clone, PartialEq)]
pub enum Trace {
    Continuous(Trajectory),
    Discrete(IterationTrace),
}

impl Trace {
    pub fn len(&self) -> usize {
        match self {
            Trace::Continuous(t) => t.len(),
            Trace::Discrete(d) => d.states.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Integration times, or iteration indices for discrete methods.
    pub fn times(&self) -> Vec<f64> {
        match self {
            Trace::Continuous(t) => t.times.clone(),
            Trace::Discrete(d) => (0..d.states.len()).map(|k| k as f64).collect(),
        }
    }

    pub fn states(&self) -> &[Vec<f64>] {
        match self {
            Trace::Continuous(t) => &t.states,
            Trace::Discrete(d) => &d.states,
        }
    }

    pub fn trajectory(&self) -> Option<&Trajectory> {
        match self {
            Trace::Continuous(t) => Some(t),
            Trace::Discrete(_) => None,
        }
    }
}

/// Work spent by a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cost {
    /// Solver steps or descent iterations.
    pub steps: usize,
    /// Gradient (or fractional-slope) evaluations.
    pub field_evaluations: usize,
    /// Informational only; never part of deterministic output.
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub label: String,
    pub metric: Metric,
    pub trace: Trace,
    /// Metric at every trace entry.
    pub metrics: Vec<f64>,
    pub first_passage: Vec<FirstPassage>,
    pub final_metric: f64,
    pub best_metric: f64,
    pub converged_to: Vec<f64>,
    /// The `stop_below` criterion fired.
    pub converged: bool,
    pub cost: Cost,
}

impl RunResult {
    pub fn passage(&self, threshold: f64) -> Option<f64> {
        self.first_passage.iter().find(|p| p.threshold == threshold).and_then(|p| p.time)
    }

    /// Writes `t,u_0,...,u_{d-1},<metric>` with one row per trace entry.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let d = self.converged_to.len();
        let mut header = vec!["t".to_string()];
        header.extend((0..d).map(|i| format!("u_{i}")));
        header.push(self.metric.name().to_string());
        w.write_record(&header)?;
        for ((t, s), m) in self.trace.times().iter().zip(self.trace.states()).zip(&self.metrics) {
            let mut row = Vec::with_capacity(d + 2);
            row.push(format_real(*t));
            row.extend(s.iter().map(|x| format_real(*x)));
            row.push(format_real(*m));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Dispatches on the configured method. Discrete rules take their step count from
/// `max_iter`, continuous ones their horizon from `t_end`.
pub fn run(objective: &dyn Objective, u0: &[f64], cfg: &OptimizerConfig, stop: &StoppingRule) -> Result<RunResult> {
    match cfg.method() {
        Method::Gdm => run_gdm(objective, u0, cfg, stop),
        Method::Fgdm => {
            if u0.len() != 1 {
                return Err(Error::Scope("FGDM is defined for scalar objectives only".into()));
            }
            run_fgdm(objective, u0[0], cfg, stop)
        }
        Method::Cgm | Method::Fctm => run_fctm(objective, u0, cfg, stop),
    }
}

/// Shared bookkeeping for metrics, first passages and the stop criterion.
pub(crate) struct Monitor<'a> {
    objective: &'a dyn Objective,
    stop: &'a StoppingRule,
    metrics: Vec<f64>,
    passages: Vec<FirstPassage>,
    best: f64,
    converged: bool,
}

impl<'a> Monitor<'a> {
    pub(crate) fn new(objective: &'a dyn Objective, stop: &'a StoppingRule) -> Result<Self> {
        stop.validate()?;
        let passages = stop.thresholds.iter().map(|&threshold| FirstPassage { threshold, time: None }).collect();
        Ok(Monitor { objective, stop, metrics: Vec::new(), passages, best: f64::INFINITY, converged: false })
    }

    /// Records the state at `t`; returns `true` once the stop criterion fires.
    pub(crate) fn observe(&mut self, t: f64, u: &[f64]) -> Result<bool> {
        let m = self.stop.metric.evaluate(self.objective, u)?;
        self.metrics.push(m);
        self.best = self.best.min(m);
        for p in &mut self.passages {
            if p.time.is_none() && m < p.threshold {
                p.time = Some(t);
            }
        }
        if self.stop.stop_below.is_some_and(|eps| m < eps) {
            self.converged = true;
        }
        Ok(self.converged)
    }

    pub(crate) fn finish(self, label: String, trace: Trace, cost: Cost) -> RunResult {
        let converged_to = trace.states().last().cloned().unwrap_or_default();
        RunResult {
            label,
            metric: self.stop.metric,
            final_metric: self.metrics.last().copied().unwrap_or(f64::NAN),
            metrics: self.metrics,
            first_passage: self.passages,
            best_metric: self.best,
            converged_to,
            converged: self.converged,
            trace,
            cost,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_quadratic;

    #[test]
    fn thresholds_must_decrease() {
        let s = StoppingRule::horizon(Metric::Value, 1.0).with_thresholds(vec![0.1, 0.1]);
        assert!(s.validate().is_err());
        let s = StoppingRule::horizon(Metric::Value, 1.0).with_thresholds(vec![0.1, 0.01]);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn metric_evaluation() {
        let q = make_quadratic(3.0);
        assert_eq!(Metric::DistanceToOptimum.evaluate(&q, &[1.0]).unwrap(), 2.0);
        assert_eq!(Metric::Value.evaluate(&q, &[1.0]).unwrap(), 4.0);
        assert_eq!(Metric::ResidualNorm.evaluate(&q, &[1.0]).unwrap(), 2.0);
        assert_eq!(Metric::Gap.evaluate(&q, &[1.0]).unwrap(), 4.0);
    }

    #[test]
    fn labels_and_parsing() {
        let w = MemoryWindow::fixed(0.0);
        let cfg = OptimizerConfig::fgdm(FractionalOrder::new(0.9).unwrap(), 0.05, FractionalOperator::Caputo, w);
        assert_eq!(cfg.label(), "FGDM-Caputo(alpha=0.9)");
        assert_eq!("fctm".parse::<Method>().unwrap(), Method::Fctm);
        assert!("adam".parse::<Method>().is_err());
    }

    #[test]
    fn fctm_velocity_only_above_one() {
        let cfg = OptimizerConfig::Fctm {
            alpha: FractionalOrder::new(0.5).unwrap(),
            lambda: 1.0,
            h: 0.01,
            v0: Some(vec![0.5]),
        };
        assert!(cfg.validate().is_err());
    }
}
