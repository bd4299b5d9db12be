//! Errors reported by commands and the service, with their JSON form.

use serde::Serialize;

use crate::scoring::ModelName;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    /// Invalid input; HTTP 400.
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    /// The requested model does not apply to this proband; HTTP 422.
    #[error("{model} is not applicable: {reason}")]
    Ineligible { model: String, reason: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<&'a str>,
}

impl CliError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn ineligible(model: &ModelName, reason: impl Into<String>) -> Self {
        CliError::Ineligible {
            model: model.as_string(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError::Internal(message.into())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Invalid { .. } => "invalid_input",
            CliError::Ineligible { .. } => "ineligible",
            CliError::Io { .. } => "io",
            CliError::Internal(_) => "internal",
        }
    }

    pub fn http_status(&self) -> u16 {
        match self {
            CliError::Invalid { .. } => 400,
            CliError::Ineligible { .. } => 422,
            CliError::Io { .. } | CliError::Internal(_) => 500,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => 2,
            CliError::Ineligible { .. } => 3,
            CliError::Io { .. } => 4,
            CliError::Internal(_) => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (field, model, path, message) = match self {
            CliError::Invalid { field, message } => {
                (Some(field.as_str()), None, None, message.clone())
            }
            CliError::Ineligible { model, reason } => {
                (None, Some(model.as_str()), None, reason.clone())
            }
            CliError::Io { path, message } => (None, None, Some(path.as_str()), message.clone()),
            CliError::Internal(m) => (None, None, None, m.clone()),
        };
        serde_json::to_value(ErrorBody {
            error: self.kind(),
            message,
            field,
            model,
            path,
        })
        .expect("error serializes")
    }
}

impl From<riskfuse_core::pedigree::PedigreeError> for CliError {
    fn from(e: riskfuse_core::pedigree::PedigreeError) -> Self {
        use riskfuse_core::pedigree::PedigreeError::*;
        let field = match &e {
            Schema { id, .. } | Semantic { id, .. } => format!("pedigree.members[id={id}]"),
            RiskFactors(_) => "risk_factors".into(),
            Syntax(_) | Structure(_) => "pedigree".into(),
        };
        CliError::Invalid {
            field,
            message: e.to_string(),
        }
    }
}
