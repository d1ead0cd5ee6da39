//! Weight filtrations of commuting nilpotent endomorphisms, the combinatorial
//! de Rham complexes built from them, and a finite model of nearby cycles.
//!
//! Everything is computed exactly over the rationals.

pub mod complexes;
pub mod error;
pub mod orbit;
pub mod psi;
pub mod qlinalg;
pub mod scat;
pub mod weightcore;

pub use error::{Error, Result};
