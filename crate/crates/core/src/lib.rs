//! Exact counts of pairs of matrices `(A, B)` over a finite field with `AB = ζBA`.
//!
//! Three independent pipelines compute the same numbers:
//!
//! * [`oracle`] enumerates every `A` and counts the solutions `B` by linear algebra,
//! * [`counting`] evaluates closed-form partition sums at a concrete `q`,
//! * [`qfunc`] expands the generating functions symbolically and yields polynomials in `q`.
//!
//! [`suite`] runs the cross-checks between them.

pub mod counting;
pub mod error;
pub mod ff;
pub mod linalg;
pub mod oracle;
pub mod qfunc;
pub mod suite;

pub use counting::{ClosedForm, CountReport, CountSet, Method, Partition};
pub use error::{Error, Result};
pub use ff::{FieldElement, FieldSpec, PolyFF};
pub use linalg::{FittingPair, InvariantFactors, MatrixFF};
pub use qfunc::{PolyQ, RatQ, SeriesX};
