//! Crate-wide error type.

/// Errors reported by the library.
///
/// Variants map to the failure classes of the numerical pipelines: bad
/// mathematical inputs (`Domain`), inputs that collapse a construction
/// (`Degenerate`), malformed grids or settings (`Config`), numerical blowup
/// (`Divergence`), and assembled objects that fail their own consistency
/// checks (`Inconsistent`).
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical divergence: {0}")]
    Divergence(String),
    #[error("construction inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
