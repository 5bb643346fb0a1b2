//! Finite-truncation toolkit for submodules of full Fock spaces and their
//! tensor products.

pub mod blh;
pub mod examples;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod modana;
pub mod polyball;
pub mod random;
pub mod subspace;
pub mod variety;
pub mod words;

pub use error::{Error, Result};
pub use fock::{FockNModule, OperatorMatrix, SpaceDesc, TruncatedFock};
pub use linalg::{Mat, Vector, C64};
pub use subspace::Subspace;
pub use words::{MultiIndex, Word};
