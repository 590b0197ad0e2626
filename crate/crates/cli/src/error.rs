use std::path::Path;

use keygraph_core::{AnalyticError, MonteCarloError};
use thiserror::Error;

/// Exit codes: 0 success, 2 usage, 3 infeasible design, 4 I/O.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("no feasible design: {0}")]
    Infeasible(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Simulation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Io(_) | CliError::Data(_) => 4,
            CliError::Simulation(_) => 1,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(std::io::Error::new(err.kind(), format!("{}: {err}", path.display())))
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::NoFeasibleDesign(msg) => CliError::Infeasible(msg),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<MonteCarloError> for CliError {
    fn from(e: MonteCarloError) -> Self {
        match e {
            MonteCarloError::Params(p) => CliError::Usage(p.to_string()),
            MonteCarloError::Config(msg) => CliError::Usage(msg),
            other => CliError::Simulation(other.to_string()),
        }
    }
}
