//! Finite fields `F_{p^e}` and exact linear algebra over them.

pub mod field;
pub mod matrix;
pub mod poly;
pub mod subspace;

pub use field::{is_prime, Elem, Field, FieldEmbedding, FieldSpec};
pub use matrix::Matrix;
pub use subspace::{left_kernel, rref_canonicalize, transporter, unit, SubspaceBasis};
