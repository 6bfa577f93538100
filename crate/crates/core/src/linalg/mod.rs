//! Matrix algebra over finite fields: ranks, Fitting decompositions, twisted centralizers
//! and invariant factors.

mod matrix;
mod smith;

pub use matrix::{FittingPair, MatrixClass, MatrixFF};
pub use smith::{smith_diagonal, InvariantFactors, ZetaSimilarity};
