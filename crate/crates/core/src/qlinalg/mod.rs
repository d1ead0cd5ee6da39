//! Exact linear algebra over the rationals.

mod filtration;
mod matrix;
mod rat;
mod sparse;
mod subspace;

pub use filtration::{
    graded, induced_map, iterated_graded, iterated_graded_of, shift, Direction, IncFiltration, QuotientBasis,
    Subquotient,
};
pub use matrix::{jordan_block, LinMap, Matrix, Vector};
pub use rat::{ParseRatError, Rat};
pub use sparse::{Echelon, SparseMatrix, SparseRow};
pub use subspace::{image, kernel, preimage, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("{0}")]
    Contract(String),
}
