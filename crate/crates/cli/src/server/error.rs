use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub kind: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct Body<'a> {
    error: &'a str,
    message: &'a str,
}

impl ApiError {
    pub fn new(status: StatusCode, kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            kind,
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_argument", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    pub fn gone() -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", "session worker stopped")
    }
}

impl From<colav_core::Error> for ApiError {
    fn from(e: colav_core::Error) -> Self {
        use colav_core::Error::*;
        let (status, kind) = match &e {
            NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            Conflict(_) => (StatusCode::CONFLICT, "conflict"),
            Precondition(_) => (StatusCode::PRECONDITION_FAILED, "precondition_failed"),
            InvalidArgument(_) => (StatusCode::BAD_REQUEST, "invalid_argument"),
            InvalidScenario(_) => (StatusCode::BAD_REQUEST, "invalid_scenario"),
            Parse { .. } => (StatusCode::BAD_REQUEST, "parse"),
            Validation { .. } => (StatusCode::BAD_REQUEST, "validation"),
            Invariant(_) | Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        Self::new(status, kind, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "parse", r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body {
            error: self.kind,
            message: &self.message,
        };
        (self.status, Json(body)).into_response()
    }
}
