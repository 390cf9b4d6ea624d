//! Experiment definitions read from TOML.
//!
//! ```toml
//! name = "quadratic-timing"
//!
//! [problem]
//! kind = "quadratic"
//! center = 3.0
//!
//! [run]
//! metric = "distance"
//! thresholds = [0.1, 0.003]
//! t_end = 40.0
//!
//! [[method]]
//! kind = "FCTM"
//! alpha = 1.2
//! lambda = 1.0
//! h = 0.001
//! ```

use std::path::Path;
use std::sync::Arc;

use fracopt::fracops::{FractionalOperator, DEFAULT_GL_STEP};
use fracopt::problems::{CoefficientSource, NodeRule};
use fracopt::{
    make_quadratic, make_thomson, make_vandermonde, FractionalOrder, MemoryWindow, Metric, Objective,
    OptimizerConfig, StoppingRule,
};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.1, 0.01, 0.001];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default)]
    pub method: Vec<MethodSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProblemSpec {
    Quadratic {
        #[serde(default = "default_center")]
        center: f64,
    },
    Vandermonde {
        #[serde(default = "default_degree")]
        degree: usize,
        /// Explicit nodes; defaults to (j + 1)/(m + 2).
        nodes: Option<Vec<f64>>,
        /// Explicit ground truth; defaults to alternating ±1.
        u_true: Option<Vec<f64>>,
        /// Draw the ground truth from U[-1, 1] with this seed instead.
        coefficient_seed: Option<u64>,
    },
    Thomson {
        charges: usize,
    },
}

fn default_center() -> f64 {
    3.0
}

fn default_degree() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// `distance`, `value`, `residual` or `gap`; defaults per problem.
    pub metric: Option<String>,
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<f64>,
    /// Horizon shared by all continuous methods.
    pub t_end: Option<f64>,
    /// Iteration budget for discrete methods.
    pub max_iter: Option<usize>,
    pub stop_below: Option<f64>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
    /// Starting point; defaults to 1 (quadratic), 0 (Vandermonde) or a seeded
    /// random configuration (Thomson).
    pub initial: Option<Vec<f64>>,
    #[serde(default = "default_true")]
    pub write_traces: bool,
}

fn default_thresholds() -> Vec<f64> {
    DEFAULT_THRESHOLDS.to_vec()
}

fn default_restarts() -> usize {
    1
}

fn default_true() -> bool {
    true
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            metric: None,
            thresholds: default_thresholds(),
            t_end: None,
            max_iter: None,
            stop_below: None,
            restarts: 1,
            seed: 0,
            initial: None,
            write_traces: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum MethodSpec {
    #[serde(alias = "gdm")]
    GDM { omega: f64 },
    #[serde(alias = "cgm")]
    CGM {
        lambda: f64,
        h: f64,
        #[serde(default = "default_rel_tol")]
        rel_tol: f64,
        #[serde(default = "default_abs_tol")]
        abs_tol: f64,
        max_step: Option<f64>,
    },
    #[serde(alias = "fgdm")]
    FGDM {
        alpha: f64,
        omega: f64,
        /// `caputo` or `rl`.
        #[serde(default = "default_operator")]
        operator: String,
        #[serde(default)]
        lower_limit: f64,
        /// Short-memory length L; omit for a fixed lower limit.
        memory_length: Option<f64>,
        /// Grünwald–Letnikov mesh width.
        gl_step: Option<f64>,
    },
    #[serde(alias = "fctm")]
    FCTM { alpha: f64, lambda: f64, h: f64, v0: Option<Vec<f64>> },
}

fn default_rel_tol() -> f64 {
    1e-8
}

fn default_abs_tol() -> f64 {
    1e-10
}

fn default_operator() -> String {
    "caputo".into()
}

impl MethodSpec {
    pub fn to_config(&self) -> Result<OptimizerConfig, HarnessError> {
        let order = |a: f64| FractionalOrder::new(a).map_err(HarnessError::from);
        let cfg = match self {
            MethodSpec::GDM { omega } => OptimizerConfig::gdm(*omega),
            MethodSpec::CGM { lambda, h, rel_tol, abs_tol, max_step } => OptimizerConfig::Cgm {
                lambda: *lambda,
                h: *h,
                rel_tol: *rel_tol,
                abs_tol: *abs_tol,
                max_step: max_step.unwrap_or(f64::INFINITY),
            },
            MethodSpec::FGDM { alpha, omega, operator, lower_limit, memory_length, gl_step } => {
                let op = match operator.to_ascii_lowercase().as_str() {
                    "caputo" => FractionalOperator::Caputo,
                    "rl" | "riemann-liouville" => FractionalOperator::RiemannLiouville,
                    other => return Err(HarnessError::Config(format!("unknown operator {other:?}"))),
                };
                let window = match memory_length {
                    None => match gl_step {
                        Some(s) => MemoryWindow::fixed(*lower_limit).with_step(*s)?,
                        None => MemoryWindow::fixed(*lower_limit),
                    },
                    Some(l) => MemoryWindow::new(*lower_limit, *l, gl_step.unwrap_or(DEFAULT_GL_STEP.min(*l)))?,
                };
                OptimizerConfig::fgdm(order(*alpha)?, *omega, op, window)
            }
            MethodSpec::FCTM { alpha, lambda, h, v0 } => {
                OptimizerConfig::Fctm { alpha: order(*alpha)?, lambda: *lambda, h: *h, v0: v0.clone() }
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ProblemSpec {
    pub fn id(&self) -> String {
        match self {
            ProblemSpec::Quadratic { .. } => "quadratic".into(),
            ProblemSpec::Vandermonde { degree, .. } => format!("vandermonde-{degree}"),
            ProblemSpec::Thomson { charges } => format!("thomson-{charges}"),
        }
    }

    pub fn build(&self) -> Result<Arc<dyn Objective>, HarnessError> {
        Ok(match self {
            ProblemSpec::Quadratic { center } => Arc::new(make_quadratic(*center)),
            ProblemSpec::Vandermonde { degree, nodes, u_true, coefficient_seed } => {
                let nodes = nodes.clone().map_or(NodeRule::Uniform, NodeRule::Explicit);
                let coefficients = match (u_true, coefficient_seed) {
                    (Some(_), Some(_)) => {
                        return Err(HarnessError::Config("give either u_true or coefficient_seed, not both".into()))
                    }
                    (Some(u), None) => CoefficientSource::Explicit(u.clone()),
                    (None, Some(s)) => CoefficientSource::Seeded(*s),
                    (None, None) => CoefficientSource::Alternating,
                };
                Arc::new(make_vandermonde(*degree, nodes, coefficients)?)
            }
            ProblemSpec::Thomson { charges } => Arc::new(make_thomson(*charges)?),
        })
    }

    pub fn default_metric(&self) -> Metric {
        match self {
            ProblemSpec::Quadratic { .. } => Metric::DistanceToOptimum,
            ProblemSpec::Vandermonde { .. } => Metric::ResidualNorm,
            ProblemSpec::Thomson { .. } => Metric::Value,
        }
    }

    /// Starting point for one restart.
    pub fn initial_point(&self, explicit: Option<&[f64]>, seed: u64) -> Result<Vec<f64>, HarnessError> {
        if let Some(u) = explicit {
            return Ok(u.to_vec());
        }
        Ok(match self {
            ProblemSpec::Quadratic { .. } => vec![1.0],
            ProblemSpec::Vandermonde { degree, .. } => vec![0.0; degree + 1],
            ProblemSpec::Thomson { charges } => fracopt::problems::random_sphere_configuration(*charges, seed)?,
        })
    }
}

/// Seed of restart `r` derived from the base seed.
pub fn derive_seed(base: u64, restart: usize) -> u64 {
    base.wrapping_mul(1000).wrapping_add(restart as u64)
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("experiment specs always serialize")
    }

    pub fn metric(&self) -> Result<Metric, HarnessError> {
        match &self.run.metric {
            Some(m) => Ok(m.parse()?),
            None => Ok(self.problem.default_metric()),
        }
    }

    pub fn stopping_rule(&self) -> Result<StoppingRule, HarnessError> {
        Ok(StoppingRule {
            metric: self.metric()?,
            thresholds: self.run.thresholds.clone(),
            stop_below: self.run.stop_below,
            t_end: self.run.t_end,
            max_iter: self.run.max_iter,
        })
    }

    /// Stopping rule for one method: discrete rules keep `max_iter`, continuous ones
    /// drop it so all continuous methods share `t_end`.
    pub fn stopping_rule_for(&self, method: &MethodSpec) -> Result<StoppingRule, HarnessError> {
        let mut rule = self.stopping_rule()?;
        match method {
            MethodSpec::GDM { .. } | MethodSpec::FGDM { .. } => {
                rule.max_iter = self.run.max_iter;
                rule.t_end = None;
            }
            _ => rule.max_iter = None,
        }
        Ok(rule)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return Err(HarnessError::Config(format!("invalid experiment name {:?}", self.name)));
        }
        if self.method.is_empty() {
            return Err(HarnessError::Config("at least one [[method]] entry is required".into()));
        }
        if self.run.restarts == 0 {
            return Err(HarnessError::Config("restarts must be at least 1".into()));
        }
        let objective = self.problem.build()?;
        let rule = self.stopping_rule()?;
        rule.metric.evaluate(objective.as_ref(), &self.problem.initial_point(self.run.initial.as_deref(), 0)?)?;
        if let Some(u) = &self.run.initial {
            if u.len() != objective.dimension() {
                return Err(HarnessError::Config(format!(
                    "initial point has {} entries, the problem has dimension {}",
                    u.len(),
                    objective.dimension()
                )));
            }
        }
        for m in &self.method {
            let cfg = m.to_config()?;
            let rule = self.stopping_rule_for(m)?;
            if cfg.method().is_continuous() && rule.t_end.is_none() {
                return Err(HarnessError::Config(format!("{} needs run.t_end", cfg.label())));
            }
            if !cfg.method().is_continuous() && rule.max_iter.is_none() {
                return Err(HarnessError::Config(format!("{} needs run.max_iter", cfg.label())));
            }
            if matches!(m, MethodSpec::FGDM { .. }) && objective.dimension() != 1 {
                return Err(HarnessError::Config("FGDM needs a scalar problem".into()));
            }
            if let MethodSpec::FCTM { v0: Some(v), .. } = m {
                if v.len() != objective.dimension() {
                    return Err(HarnessError::Config("v0 dimension mismatch".into()));
                }
            }
            rule.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUADRATIC: &str = r#"
name = "q"
[problem]
kind = "quadratic"
[run]
t_end = 5.0
max_iter = 100
[[method]]
kind = "FCTM"
alpha = 0.9
lambda = 1.0
h = 0.01
[[method]]
kind = "FGDM"
alpha = 0.9
omega = 0.05
memory_length = 0.001
"#;

    #[test]
    fn parses_and_builds() {
        let spec = ExperimentSpec::from_toml(QUADRATIC).unwrap();
        assert_eq!(spec.run.thresholds, DEFAULT_THRESHOLDS.to_vec());
        assert_eq!(spec.metric().unwrap(), Metric::DistanceToOptimum);
        let labels: Vec<_> = spec.method.iter().map(|m| m.to_config().unwrap().label()).collect();
        assert_eq!(labels, ["FCTM(alpha=0.9)", "FGDM-Caputo(alpha=0.9,L=0.001)"]);
        let round = ExperimentSpec::from_toml(&spec.to_toml()).unwrap();
        assert_eq!(round, spec);
    }

    #[test]
    fn rejects_bad_specs() {
        let empty = "name = \"e\"\n[problem]\nkind = \"quadratic\"\n";
        assert!(matches!(ExperimentSpec::from_toml(empty), Err(HarnessError::Config(_))));
        let bad = QUADRATIC.replace("max_iter = 100", "max_iter = 100\nthresholds = [0.1, 0.2]");
        assert!(ExperimentSpec::from_toml(&bad).is_err());
        let typo = QUADRATIC.replace("lambda", "lamda");
        assert!(ExperimentSpec::from_toml(&typo).is_err());
        let vector_fgdm = QUADRATIC.replace("kind = \"quadratic\"", "kind = \"vandermonde\"\ndegree = 2");
        assert!(ExperimentSpec::from_toml(&vector_fgdm).is_err());
    }

    #[test]
    fn seeds_are_derived_from_the_base() {
        assert_eq!(derive_seed(7, 0), 7000);
        assert_eq!(derive_seed(7, 9), 7009);
    }
}
