use glc_core::format::{GlcError, JsonError};
use glc_core::lambda::{DecodeError, NormalizeError, SyntaxError};
use glc_core::moves::MoveError;
use glc_core::scenarios::ScenarioError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("term: {0}")]
    Term(#[from] SyntaxError),
    #[error(transparent)]
    Glc(#[from] GlcError),
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error("unknown move {0:?}")]
    UnknownMove(String),
    #[error("unknown direction {0:?}")]
    UnknownDirection(String),
    #[error("malformed site {0:?}")]
    BadSite(String),
    #[error("no current site matches descriptor {0:?}")]
    StaleDescriptor(String),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("nothing to undo")]
    EmptyHistory,
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Term(_) => "TERM_SYNTAX",
            Error::Glc(_) => "GLC_SYNTAX",
            Error::Json(_) => "GRAPH_JSON",
            Error::UnknownMove(_) => "UNKNOWN_MOVE",
            Error::UnknownDirection(_) => "UNKNOWN_DIRECTION",
            Error::BadSite(_) => "BAD_SITE",
            Error::StaleDescriptor(_) | Error::Move(MoveError::SiteStale(_)) => "SITE_STALE",
            Error::Move(MoveError::DirectionForbidden(_)) => "DIRECTION_FORBIDDEN",
            Error::Move(_) => "MOVE_REJECTED",
            Error::Decode(_) => "DECODE_FAILED",
            Error::Normalize(NormalizeError::Timeout { .. }) => "FUEL_EXHAUSTED",
            Error::Normalize(_) => "NORMALIZE_FAILED",
            Error::Scenario(_) => "UNKNOWN_SCENARIO",
            Error::UnknownSession(_) => "UNKNOWN_SESSION",
            Error::EmptyHistory => "EMPTY_HISTORY",
            Error::BadRequest(_) => "BAD_REQUEST",
            Error::Io { .. } => "IO",
        }
    }

    /// HTTP status for the service.
    pub fn status(&self) -> u16 {
        match self {
            Error::UnknownSession(_) => 404,
            Error::StaleDescriptor(_) | Error::Move(MoveError::SiteStale(_)) | Error::EmptyHistory => 409,
            Error::Move(_) | Error::Decode(_) | Error::Normalize(_) => 422,
            Error::Io { .. } => 500,
            _ => 400,
        }
    }
}
