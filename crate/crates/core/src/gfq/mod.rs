//! Arithmetic over `Z_q` and the unitriangular group `G_n(q)`.
//!
//! Indices are 0-based throughout: `row_update(i, a)` adds `a` times row
//! `i + 1` to row `i`, for `i` in `0..n-1`.

mod bits;
mod matrix;
mod rank;
mod scalar;

pub use bits::{BitBasis, BitColumns, BitUnitri, MAX_BIT_DIM};
pub use matrix::{FieldVector, Matrix, UnitriMatrix, Unitriangular};
pub use rank::RankBasis;
pub use scalar::{is_prime, ArithOp, FieldScalar, Modulus};
