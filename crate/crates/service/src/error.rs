use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use mastite_core::StoreError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<FieldError>,
}

/// Errors on the JSON surface.
#[derive(Debug, Error)]
pub enum ApiError {
    #[error("invalid request")]
    BadRequest(Vec<FieldError>),
    #[error("no readings stored")]
    NotFound,
    #[error("storage failure: {0}")]
    Storage(String),
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Empty => ApiError::NotFound,
            StoreError::InvalidRange { .. } => {
                ApiError::BadRequest(vec![FieldError::new("from", e.to_string())])
            }
            StoreError::Validation(msg) => ApiError::BadRequest(vec![FieldError::new("body", msg)]),
            StoreError::Storage(msg) => ApiError::Storage(msg),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (code, fields) = match &self {
            ApiError::BadRequest(f) => (StatusCode::BAD_REQUEST, f.clone()),
            ApiError::NotFound => (StatusCode::NOT_FOUND, Vec::new()),
            ApiError::Storage(msg) => {
                tracing::error!(error = %msg, "storage failure");
                (StatusCode::INTERNAL_SERVER_ERROR, Vec::new())
            }
        };
        let body = ErrorBody {
            error: self.to_string(),
            fields,
        };
        (code, Json(body)).into_response()
    }
}
