use thiserror::Error;

use crate::network::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {}", join(.0))]
    InvalidNetwork(Vec<Violation>),

    #[error("invalid pipe catalog: {0}")]
    InvalidCatalog(String),

    #[error("invalid hydraulic settings: {0}")]
    InvalidSettings(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),

    /// An argument lies outside the domain of a formula (negative flow, non-positive diameter).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("population is empty")]
    EmptyPopulation,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("mutation needs at least 2 gene values, got {0}")]
    NoAlternativeGene(usize),

    #[error("search space of {size} designs exceeds the limit of {limit}")]
    SearchSpaceTooLarge { size: String, limit: u64 },

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("malformed report: {0}")]
    MalformedReport(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        let mut message = err.to_string();
        if let Some(pos) = message.rfind(" at line ") {
            message.truncate(pos);
        }
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message,
        }
    }
}
