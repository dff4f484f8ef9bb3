use proptest::prelude::*;
use qiqp::linalg::{determinant, max_abs_subdeterminant};
use qiqp::{int, Int, IntMatrix, Matrix};

/// Determinant by Laplace expansion along the first row.
fn laplace(rows: &[Vec<i64>]) -> i64 {
    match rows.len() {
        0 => 1,
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    rows[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * rows[0][j] * laplace(&minor)
            })
            .sum(),
    }
}

/// Every square submatrix through bitmask subsets of rows and columns.
fn max_minor(rows: &[Vec<i64>]) -> i64 {
    let (m, n) = (rows.len(), rows[0].len());
    let mut best = 0;
    for rmask in 1u32..(1 << m) {
        for cmask in 1u32..(1 << n) {
            if rmask.count_ones() != cmask.count_ones() {
                continue;
            }
            let sub: Vec<Vec<i64>> = (0..m)
                .filter(|i| rmask >> i & 1 == 1)
                .map(|i| (0..n).filter(|j| cmask >> j & 1 == 1).map(|j| rows[i][j]).collect())
                .collect();
            best = best.max(laplace(&sub).abs());
        }
    }
    best
}

fn to_matrix(rows: &[Vec<i64>]) -> IntMatrix {
    Matrix::from_rows(rows[0].len(), rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()).unwrap()
}

proptest! {
    #[test]
    fn largest_minor_matches_bitmask_enumeration(rows in proptest::collection::vec(proptest::collection::vec(-4i64..=4, 4), 3)) {
        prop_assert_eq!(max_abs_subdeterminant(&to_matrix(&rows)), int(max_minor(&rows)));
    }

    #[test]
    fn determinant_matches_laplace(n in 1usize..=4, seed in proptest::collection::vec(-5i64..=5, 16)) {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| seed[i * n..(i + 1) * n].to_vec()).collect();
        prop_assert_eq!(determinant(&to_matrix(&rows)).unwrap(), Int::from(laplace(&rows)));
    }
}
