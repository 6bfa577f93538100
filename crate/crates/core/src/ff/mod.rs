//! Finite fields GF(p^k) and polynomials over them.

mod field;
mod poly;

pub use field::{is_prime, prime_power, FieldElement, FieldOp, FieldSpec, DEFAULT_FIELD_BOUND};
pub use poly::{pm_member, PolyFF};
