//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Structurally invalid input (dimension mismatches, bad coordinates,
    /// non-homomorphisms, schema violations).
    #[error("malformed input: {0}")]
    Malformed(String),

    /// A computation the engine deliberately does not perform for this
    /// input shape.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A configured size or work bound was exceeded.
    #[error("resource bound exceeded: {0}")]
    Resource(String),

    /// Building data that fails the cover validity constraints, where the
    /// operation requires validated input.
    #[error("invalid building data: {0}")]
    Invalid(String),
}

impl Error {
    pub fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }
    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
