//! Experiment runner behind the `fracopt` command line tool.

pub mod check;
pub mod experiment;
pub mod reproduce;
pub mod spec;

pub use experiment::{run_experiment, CellStatus, ExperimentReport, RunOptions, SummaryRecord};
pub use reproduce::{reproduce, ReproduceReport, Target};
pub use spec::{ExperimentSpec, MethodSpec, ProblemSpec, RunSpec};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] fracopt::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// Process exit code for this error: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Core(fracopt::Error::Config(_)) => 2,
            _ => 1,
        }
    }
}
