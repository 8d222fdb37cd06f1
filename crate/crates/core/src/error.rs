//! Crate-wide error type.
//!
//! Exit-code mapping in the CLI relies on the variant split: syntax/schema
//! problems are usage-class errors, while domain, singularity, and
//! convergence failures are numeric-class errors.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The input was not well-formed JSON at all.
    #[error("syntax error: {0}")]
    Syntax(String),

    /// The input parsed as JSON but violates the study schema. `path`
    /// points at the offending key (e.g. `items[3].mean`).
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    /// An argument fell outside an operation's documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The design matrix is numerically rank-deficient.
    #[error("singular design matrix: {0}")]
    Singular(String),

    /// An iterative scheme exhausted its iteration budget before reaching
    /// the convergence tolerance.
    #[error("{what} did not converge within {max_iter} iterations")]
    NoConvergence { what: &'static str, max_iter: usize },
}

impl Error {
    /// Convenience constructor used throughout the numeric modules.
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
