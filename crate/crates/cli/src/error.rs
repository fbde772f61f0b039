use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {}{message}", field_prefix(field))]
    ConfigParse {
        path: String,
        line: usize,
        column: usize,
        /// Dotted path of the offending field; empty at document level.
        field: String,
        message: String,
    },

    #[error("config field `{field}`: {reason}")]
    ConfigInvalid { field: String, reason: String },

    #[error("cannot read {}: {source}", path.display())]
    ReadConfig { path: PathBuf, source: io::Error },

    #[error("numerical failure: {0}")]
    Numerical(spinphoton_core::Error),

    #[error("invalid parameters: {0}")]
    Parameter(spinphoton_core::Error),

    #[error("cannot write output: {0}")]
    Write(#[from] io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn field_prefix(field: &str) -> String {
    if field.is_empty() {
        String::new()
    } else {
        format!("field `{field}`: ")
    }
}

impl CliError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::ConfigInvalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// 2 for anything wrong with the config, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigParse { .. }
            | CliError::ConfigInvalid { .. }
            | CliError::ReadConfig { .. }
            | CliError::Parameter(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Write(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}

impl From<spinphoton_core::Error> for CliError {
    fn from(e: spinphoton_core::Error) -> Self {
        use spinphoton_core::Error as E;
        match e {
            E::NoRootInBracket { .. }
            | E::ZeroProbabilityReadout { .. }
            | E::Indeterminate
            | E::NoHerald
            | E::InvalidModel(_) => CliError::Numerical(e),
            _ => CliError::Parameter(e),
        }
    }
}
