//! Error type shared across the crate.

/// Errors surfaced by the library and the CLI harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument violated a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A configuration value is out of range or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
    /// A numerical routine failed (e.g. a factorization pivot collapsed).
    #[error("numerical error: {0}")]
    Numerical(String),
    /// An operation was called on an object in the wrong state.
    #[error("state error: {0}")]
    State(String),
    /// A resource limit (point-count cap, retry budget) was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
