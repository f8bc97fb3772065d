use radshock_core::ErrorClass;
use serde::Serialize;
use thiserror::Error;

pub const EXIT_REFUSAL: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] radshock_core::Error),

    #[error("usage: {0}")]
    Usage(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("verification gates failed: {}", .0.join(", "))]
    GatesFailed(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One-line JSON record printed on stderr when a command fails.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub class: String,
    pub exit_code: i32,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failed_gates: Vec<String>,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_io() => EXIT_IO,
            CliError::Core(e) => match e.class() {
                ErrorClass::Refusal => EXIT_REFUSAL,
                ErrorClass::Numerical => EXIT_NUMERICAL,
            },
            CliError::Usage(_) | CliError::Config(_) => EXIT_REFUSAL,
            CliError::GatesFailed(_) => EXIT_NUMERICAL,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => EXIT_IO,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::GatesFailed(_) => "gates_failed",
            CliError::Io(_) => "io",
            CliError::Csv(_) => "csv",
            CliError::Json(_) => "json",
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let class = match self.exit_code() {
            EXIT_REFUSAL => "refusal",
            EXIT_NUMERICAL => "numerical",
            _ => "io",
        };
        ErrorRecord {
            kind: self.kind().into(),
            class: class.into(),
            exit_code: self.exit_code(),
            message: self.to_string(),
            failed_gates: match self {
                CliError::GatesFailed(g) => g.clone(),
                _ => Vec::new(),
            },
        }
    }
}
