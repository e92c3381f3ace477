use std::path::PathBuf;

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use corelens::analysis::AnalysisError;
use corelens::model::ModelError;
use corelens::nrdf::NrdfError;
use corelens::render::RenderError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("{}: {source}", path.display())]
    Load { path: PathBuf, source: NrdfError },
    #[error("duplicate file {0}")]
    Duplicate(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// An error response: HTTP status plus a machine-readable code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn not_found(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::NOT_FOUND,
            code: "not_found",
            message: message.into(),
        }
    }

    pub fn invalid_param(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            code: "invalid_param",
            message: message.into(),
        }
    }

    pub fn malformed_body(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            code: "malformed_body",
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "internal",
            message: message.into(),
        }
    }
}

impl From<AnalysisError> for ApiError {
    fn from(e: AnalysisError) -> Self {
        let (status, code) = match &e {
            AnalysisError::InvalidArgument(_) => (StatusCode::BAD_REQUEST, "invalid_param"),
            AnalysisError::Shape(_) => (StatusCode::UNPROCESSABLE_ENTITY, "shape_error"),
            AnalysisError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            AnalysisError::Conflict(_) => (StatusCode::CONFLICT, "conflict"),
            AnalysisError::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        Self {
            status,
            code,
            message: e.to_string(),
        }
    }
}

impl From<RenderError> for ApiError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::InvalidArgument(m) => Self::invalid_param(m),
            RenderError::NotFound(m) => Self::not_found(m),
        }
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NotFound(m) => Self::not_found(m),
            ModelError::InvalidArgument(m) | ModelError::TypeError(m) => Self::invalid_param(m),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "error": { "code": self.code, "message": self.message },
        });
        crate::json::respond_with(self.status, body)
    }
}
