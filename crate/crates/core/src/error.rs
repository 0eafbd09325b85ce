//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the simulation and fitting routines.
///
/// Scenario and table parsing have their own diagnostic enums
/// ([`crate::scenario::ScenarioError`], [`crate::table::TableError`]) because
/// the CLI needs to name files, lines and keys; they convert into this type
/// at the crate boundary.
#[derive(Debug, Error)]
pub enum Error {
    /// A domain-type invariant was violated (bad argument).
    #[error("invalid {context}: {message}")]
    Invalid {
        context: &'static str,
        message: String,
    },

    /// A numerical routine could not meet its accuracy contract.
    #[error("accuracy bound violated in {context}: {message}")]
    Accuracy {
        context: &'static str,
        message: String,
    },

    #[error(transparent)]
    Scenario(#[from] crate::scenario::ScenarioError),

    #[error(transparent)]
    Table(#[from] crate::table::TableError),

    #[error(transparent)]
    Fit(#[from] crate::fit::FitError),
}

impl Error {
    pub(crate) fn invalid(context: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid {
            context,
            message: message.into(),
        }
    }

    pub(crate) fn accuracy(context: &'static str, message: impl Into<String>) -> Self {
        Error::Accuracy {
            context,
            message: message.into(),
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
