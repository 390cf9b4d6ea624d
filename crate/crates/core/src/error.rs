use std::fmt;

/// Errors raised by the numerical kernels, solvers and descent rules.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input lies outside the domain of a function or operator.
    #[error("domain error: {0}")]
    Domain(DomainError),

    /// A series or iteration failed to reach its tolerance.
    #[error("{what} did not converge (achieved error estimate {achieved:e})")]
    NonConvergent { what: &'static str, achieved: f64 },

    /// A state became nonfinite. `at` is the time (continuous) or iteration (discrete).
    #[error("divergence: nonfinite state at {at}")]
    Divergence { at: f64 },

    /// An adaptive solver could not shrink its step any further.
    #[error("step size underflow at t = {t} (h = {h:e})")]
    Stiffness { t: f64, h: f64 },

    /// Two charges coincide, so the pair energy is singular.
    #[error("singular configuration: charges {i} and {j} coincide")]
    Singularity { i: usize, j: usize },

    /// A seeded sampler exhausted its rejection budget.
    #[error("sampler exhausted its retry budget after {attempts} attempts")]
    RetryExhausted { attempts: usize },

    /// A request outside the validated scope of an algorithm.
    #[error("out of scope: {0}")]
    Scope(String),

    /// Invalid configuration or problem definition.
    #[error("configuration error: {0}")]
    Config(String),
}

/// Details of a domain violation.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainError {
    /// Gamma evaluated at a nonpositive integer.
    GammaPole(f64),
    /// Operator evaluated at or below its lower limit.
    BelowLowerLimit { u: f64, lower: f64 },
    /// Generic argument violation.
    Argument(String),
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainError::GammaPole(x) => write!(f, "gamma has a pole at {x}"),
            DomainError::BelowLowerLimit { u, lower } => {
                write!(f, "evaluation point {u} is not above the lower limit {lower}")
            }
            DomainError::Argument(msg) => f.write_str(msg),
        }
    }
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Domain(DomainError::Argument(msg.into()))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
