use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// One violated constraint, named by its dotted config path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", list(.0))]
    Config(Vec<FieldError>),

    #[error("{experiment}: {source}")]
    Numeric {
        experiment: String,
        #[source]
        source: gibbsium::Error,
    },

    #[error("{field} ({}): {source}", .path.display())]
    Io {
        field: String,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn list(errors: &[FieldError]) -> String {
    errors.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config(vec![FieldError::new(field, message)])
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
