//! Exact linear algebra over an integer scalar and its rationals.

pub mod det;
pub mod elimination;
pub mod lp;
pub mod matrix;

pub use det::{determinant, max_abs_subdeterminant};
pub use elimination::{
    augmented, canonical_system, CanonicalSystem, clear_denominators, has_full_row_rank, integer_kernel_basis, is_independent_row, kernel_columns, kernel_from_elimination,
    rank, rat_mul_vec, right_inverse, solve_particular, solve_unique_exact, to_rational, Elimination, KernelBasis,
};
pub use lp::{find_feasible_point, is_feasible, is_feasible_rational};
pub use matrix::{dot, Matrix};
