use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or scenario field failed validation.
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },

    /// The scenario file is not valid TOML or does not match the schema.
    #[error("parse error: {0}")]
    Parse(String),

    /// An argument outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// The time-stepping loop produced a non-finite or out-of-range state.
    #[error("simulation fault at t = {t:.4} s: {message}")]
    SimulationFault { t: f64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation { .. } | Error::Parse(_))
    }
}
