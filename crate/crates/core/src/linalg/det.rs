use itertools::Itertools;

use super::elimination::Elimination;
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::IntScalar;

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant<T: IntScalar>(m: &Matrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.rows() == 0 {
        return Ok(T::one());
    }
    let e = Elimination::run(m, m.cols());
    if e.rank() < m.rows() {
        return Ok(T::zero());
    }
    Ok(if e.odd_permutation { -e.scale } else { e.scale })
}

/// Largest absolute determinant over all square submatrices of every size.
///
/// Enumerates every row and column subset, which is exponential but fine for
/// the handful of rows an equality system ever has here. A matrix without
/// rows or columns yields one so that ranges built from it stay nonempty.
pub fn max_abs_subdeterminant<T: IntScalar>(m: &Matrix<T>) -> T {
    if m.rows() == 0 || m.cols() == 0 {
        return T::one();
    }
    let mut best = T::zero();
    for size in 1..=m.rows().min(m.cols()) {
        for rows in (0..m.rows()).combinations(size) {
            for cols in (0..m.cols()).combinations(size) {
                let d = determinant(&m.submatrix(&rows, &cols)).expect("submatrix is square").abs();
                if d > best {
                    best = d;
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: Vec<Vec<i64>>) -> Matrix<i64> {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(cols, rows).unwrap()
    }

    fn cofactor(a: &Matrix<i64>) -> i64 {
        let n = a.rows();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let rest: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let minor = a.submatrix(&(1..n).collect::<Vec<_>>(), &rest);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * a.get(0, j) * cofactor(&minor)
            })
            .sum()
    }

    #[test]
    fn small_determinants() {
        assert_eq!(determinant(&m(vec![vec![7]])).unwrap(), 7);
        assert_eq!(determinant(&m(vec![vec![2, 0], vec![0, 3]])).unwrap(), 6);
        assert_eq!(determinant(&m(vec![vec![1, 2], vec![3, 4]])).unwrap(), -2);
        assert_eq!(determinant(&m(vec![vec![0, 1], vec![1, 0]])).unwrap(), -1);
        assert!(determinant(&m(vec![vec![1, 2]])).is_err());
    }

    #[test]
    fn subdeterminant_examples() {
        assert_eq!(max_abs_subdeterminant(&Matrix::<i64>::empty(3)), 1);
        assert_eq!(max_abs_subdeterminant(&m(vec![vec![1, 2], vec![3, 4]])), 4);
        assert_eq!(max_abs_subdeterminant(&m(vec![vec![1, 1, 0], vec![0, 0, 1]])), 1);
        assert_eq!(max_abs_subdeterminant(&m(vec![vec![0, 0]])), 0);
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(n in 1usize..=4, seed in proptest::collection::vec(-4i64..=4, 16)) {
            let a = Matrix::new(n, n, seed[..n * n].to_vec()).unwrap();
            prop_assert_eq!(determinant(&a).unwrap(), cofactor(&a));
        }
    }
}
