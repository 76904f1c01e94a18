use thiserror::Error;

use crate::rotor::GuardRejection;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("level index out of range: ({i}, {j}) with {levels} levels")]
    LevelIndex { i: usize, j: usize, levels: usize },

    #[error("eigensolver did not converge for a {dim}x{dim} matrix")]
    Eigensolver { dim: usize },

    #[error("two-level truncation rejected{}: {rejection}", at.as_ref().map(|p| format!(" at {p}")).unwrap_or_default())]
    GuardRejected {
        rejection: GuardRejection,
        at: Option<String>,
    },

    #[error("state is not normalized (norm deviation {0:.3e})")]
    NotNormalized(f64),

    #[error("non-physical density matrix: {0}")]
    NonPhysical(String),

    #[error("dipole factors inconsistent with the {case} case: {detail}")]
    AngleCaseMismatch { case: &'static str, detail: String },

    #[error("feature not found: {0}")]
    FeatureNotFound(String),

    #[error("malformed dataset: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Attach a location (typically a sweep grid point) to a guard rejection.
    pub fn at_point(self, point: impl Into<String>) -> Self {
        match self {
            Error::GuardRejected { rejection, .. } => Error::GuardRejected {
                rejection,
                at: Some(point.into()),
            },
            other => other,
        }
    }
}
