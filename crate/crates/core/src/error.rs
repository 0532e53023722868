use crate::Q;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("incomplete enumeration: {space} cannot certify a ball of radius {radius}")]
    IncompleteEnumeration { space: String, radius: Q },

    #[error("inconclusive: {what} (required radius {})", fmt_required(.required_radius))]
    Inconclusive {
        what: String,
        required_radius: Option<Q>,
    },

    #[error("set {set} has no point within radius {radius}")]
    EmptySet { set: String, radius: Q },

    #[error("too many generators: {0} (at most 16)")]
    TooManyGenerators(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_required(r: &Option<Q>) -> String {
    match r {
        Some(r) => r.to_string(),
        None => "unbounded".to_string(),
    }
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn inconclusive(what: impl Into<String>, required_radius: Option<Q>) -> Self {
        Error::Inconclusive {
            what: what.into(),
            required_radius,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
