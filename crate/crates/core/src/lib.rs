//! Fractional-order optimization laboratory.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: Euler gamma and the two-parameter Mittag-Leffler function.
//! - [`fracops`]: Grünwald–Letnikov, Riemann–Liouville and Caputo derivatives of a
//!   scalar function of the optimization variable, including short-memory windows.
//! - [`fdesolve`]: a full-memory Adams–Bashforth–Moulton predictor-corrector for
//!   Caputo initial-value problems and an adaptive Dormand–Prince reference solver.
//! - [`optimizers`]: discrete gradient descent, the continuous gradient method,
//!   fractional-gradient descent and the fractional continuous-time method.
//! - [`problems`]: quadratic, Vandermonde interpolation and Thomson benchmark objectives.

pub mod error;
pub mod fdesolve;
mod order;
pub mod fracops;
pub mod optimizers;
pub mod problems;
pub mod specfun;

pub use error::{DomainError, Error, Result};
pub use fdesolve::{FdeProblem, FractionalOrder, SolverStats, Trajectory};
pub use fracops::{MemoryWindow, Polynomial};
pub use optimizers::{
    EnergyTrace, FirstPassage, Metric, OptimizerConfig, RunResult, StoppingRule, Trace,
};
pub use problems::{make_quadratic, make_thomson, make_vandermonde, Objective};
pub use specfun::{gamma, ln_gamma, mittag_leffler, MlSeriesConfig};
