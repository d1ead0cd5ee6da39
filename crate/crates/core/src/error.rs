use crate::qlinalg::LinalgError;

/// Errors surfaced by the library. Checks that merely fail are reported in
/// their result values; these are for inputs that cannot be processed at all.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, Error>;
