//! Exact-arithmetic mould calculus: words and shuffles, the mould algebra,
//! symmetry checkers, the named moulds, local vector fields and diffeomorphisms
//! in prepared form, and arborification.

pub mod arbor;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod localobj;
pub mod mould;
pub mod scalar;
pub mod symmetry;
pub mod words;

pub use error::{Error, Result};
pub use mould::{Alphabet, Morphism, Mould, WeightMap};
pub use scalar::{Scalar, Weights};
pub use words::{Letter, Word};
