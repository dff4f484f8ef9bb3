//! Exact integer quadratic programming for few variables and small coefficients.
//!
//! The crate solves `min xᵀQx` subject to `Ax ≤ b` over integer vectors with
//! a branching search over affine subspaces, decides unboundedness by
//! reducing it to univariate problems along finitely many lines, and uses the
//! solver to compute optimal linear arrangements of graphs with a small
//! vertex cover. Every computation is exact.

pub mod error;
pub mod linalg;
pub mod model;
pub mod ola;
pub mod oracle;
pub mod scalar;
pub mod solver;
pub mod unbounded;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use model::{AugmentedIqp, Iqp, SolveOutcome};
pub use scalar::IntScalar;

/// Arbitrary precision integer used throughout the solver.
pub type Int = BigInt;
/// Arbitrary precision rational.
pub type Rat = BigRational;
pub type IntMatrix = Matrix<Int>;
pub type RatMatrix = Matrix<Rat>;
pub type IntVector = Vec<Int>;
pub type RatVector = Vec<Rat>;

/// Convenience conversion for literals in tests and examples.
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Integer matrix from small literals.
pub fn int_matrix(cols: usize, rows: &[&[i64]]) -> IntMatrix {
    Matrix::from_rows(cols, rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
        .expect("literal rows have the declared width")
}

/// Integer vector from small literals.
pub fn int_vec(v: &[i64]) -> IntVector {
    v.iter().map(|&x| int(x)).collect()
}
