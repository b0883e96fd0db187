//! Arithmetic in `F_{p^r}` and linear algebra over it.

mod bits;
mod field;
pub mod linalg;
mod matrix;
mod subspace;
pub mod text;

pub use bits::BitRow;
pub use field::{is_prime, prime_power, Elem, Field, FieldSpec};
pub use linalg::{sparse_rank, Caps, EchelonBasis, SparseMatrix, SparseVec};
pub use matrix::{FMatrix, Rref};
pub use subspace::{enumerate_range, enumerate_subspaces, enumerate_subspaces_capped, gaussian_binomial, Subspace};

/// Convenience wrapper for [`Field::new`].
pub fn field_make(p: u32, r: u32) -> crate::Result<Field> {
    Field::new(p, r)
}
