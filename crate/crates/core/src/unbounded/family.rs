//! Every equation system the literal branching can build from `Q` and `A`.

use std::collections::HashSet;

use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::{integer_kernel_basis, is_independent_row, max_abs_subdeterminant, rank, Matrix};
use crate::solver::doubled_form_row;
use crate::{Int, IntMatrix};

/// Default cap on the number of systems in a family.
pub const DEFAULT_FAMILY_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintFamily {
    /// Distinct matrices in discovery order, starting with the empty one.
    pub matrices: Vec<IntMatrix>,
    /// Largest absolute subdeterminant over the family.
    pub delta_hat: Int,
}

impl ConstraintFamily {
    /// Members with full column rank, where branching stops.
    pub fn terminals(&self) -> impl Iterator<Item = &IntMatrix> {
        self.matrices.iter().filter(|c| c.rows() == c.cols())
    }
}

/// Explore every branch the search could take without looking at any
/// right-hand side: append each constraint row that is independent of the
/// current rows, and each `2yᵀQ` over the current kernel basis that is
/// independent, until the rows span everything.
pub fn collect_constraint_family(q: &IntMatrix, a: &IntMatrix, budget: usize) -> Result<ConstraintFamily> {
    let n = q.cols();
    let root = Matrix::empty(n);
    let mut seen: HashSet<IntMatrix> = HashSet::from([root.clone()]);
    let mut matrices = vec![root];
    let mut delta_hat = Int::one();
    let mut next = 0;
    while next < matrices.len() {
        let c = matrices[next].clone();
        next += 1;
        debug_assert_eq!(rank(&c), c.rows(), "family members have independent rows");
        if c.rows() > 0 {
            delta_hat = delta_hat.max(max_abs_subdeterminant(&c));
        }
        if c.rows() == n {
            continue;
        }
        let kernel = integer_kernel_basis(&c)?;
        let deep = kernel.columns().into_iter().map(|y| doubled_form_row(q, &y));
        let rows: Vec<Vec<Int>> = a.row_iter().map(|r| r.to_vec()).chain(deep).collect();
        for row in rows {
            if !is_independent_row(&c, &row) {
                continue;
            }
            let child = c.with_row(&row)?;
            if seen.insert(child.clone()) {
                matrices.push(child);
                if matrices.len() > budget {
                    return Err(Error::ResourceExhausted { what: "constraint family", limit: budget as u64 });
                }
            }
        }
    }
    Ok(ConstraintFamily { matrices, delta_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, int_matrix};

    #[test]
    fn one_variable() {
        let f = collect_constraint_family(&int_matrix(1, &[&[2]]), &int_matrix(1, &[&[1]]), 100).unwrap();
        assert_eq!(f.matrices, vec![Matrix::empty(1), int_matrix(1, &[&[1]]), int_matrix(1, &[&[4]])]);
        assert_eq!(f.delta_hat, int(4));
        assert_eq!(f.terminals().count(), 2);
    }

    #[test]
    fn nothing_to_add() {
        let f = collect_constraint_family(&int_matrix(1, &[&[0]]), &Matrix::empty(1), 100).unwrap();
        assert_eq!(f.matrices, vec![Matrix::empty(1)]);
        assert_eq!(f.delta_hat, int(1));
    }

    #[test]
    fn proportional_rows_share_children_up_to_equality() {
        let a = int_matrix(2, &[&[1, 1], &[2, 2], &[1, 1]]);
        let f = collect_constraint_family(&int_matrix(2, &[&[0, 0], &[0, 0]]), &a, 1000).unwrap();
        // Empty, [1 1], [2 2]: the repeated row adds nothing, and neither
        // row extends the other.
        assert_eq!(f.matrices.len(), 3);
        assert!(f.matrices.iter().all(|c| rank(c) == c.rows()));
    }

    #[test]
    fn budget() {
        let a = int_matrix(2, &[&[1, 0], &[0, 1], &[1, 1], &[1, -1]]);
        assert!(collect_constraint_family(&int_matrix(2, &[&[1, 0], &[0, 1]]), &a, 3).is_err());
    }
}
