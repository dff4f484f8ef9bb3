use num_traits::{One, Zero};
use proptest::prelude::*;
use qiqp::linalg::{integer_kernel_basis, is_independent_row, max_abs_subdeterminant};
use qiqp::model::{check_feasible, classify_solution, evaluate_objective, Classification};
use qiqp::oracle::{brute_force_with_equations, Box};
use qiqp::solver::{solve, SolverConfig};
use qiqp::{int, Int, IntMatrix, Iqp, Matrix, SolveOutcome};

fn matrix(rows: usize, cols: usize, entries: &[i64]) -> IntMatrix {
    Matrix::new(rows, cols, entries.iter().map(|&v| int(v)).collect()).unwrap()
}

/// Integer points of `[−r, r]ⁿ` in lexicographic order.
fn cube(n: usize, r: i64) -> Vec<Vec<Int>> {
    (0..n).fold(vec![vec![]], |acc, _| {
        acc.into_iter().flat_map(|p| (-r..=r).map(move |v| [p.clone(), vec![int(v)]].concat())).collect()
    })
}

fn plus(x: &[Int], y: &[Int], s: i64) -> Vec<Int> {
    x.iter().zip(y).map(|(a, b)| a + int(s) * b).collect()
}

fn instance() -> impl Strategy<Value = (usize, Vec<i64>, Vec<i64>, Vec<i64>)> {
    (1usize..=3, 0usize..=4).prop_flat_map(|(n, m)| {
        (
            Just(n),
            proptest::collection::vec(-2i64..=2, n * n),
            proptest::collection::vec(-2i64..=2, m * n),
            proptest::collection::vec(-4i64..=4, m),
        )
    })
}

fn boxed(n: usize, q: &[i64], a: &[i64], b: &[i64]) -> Iqp {
    let mut am = matrix(b.len(), n, a);
    let mut bv: Vec<Int> = b.iter().map(|&v| int(v)).collect();
    for i in 0..n {
        for s in [1, -1] {
            let mut row = vec![Int::zero(); n];
            row[i] = int(s);
            am.push_row(&row).unwrap();
            bv.push(int(3));
        }
    }
    Iqp::new(matrix(n, n, q), am, bv).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn returned_points_are_feasible((n, q, a, b) in instance()) {
        let iqp = boxed(n, &q, &a, &b);
        let report = solve(&iqp, &SolverConfig::default()).unwrap();
        if let SolveOutcome::Optimal { x, value } = &report.outcome {
            prop_assert!(check_feasible(&iqp.a, &iqp.b, &Matrix::empty(n), &[], x).unwrap());
            prop_assert_eq!(value.to_integer(), evaluate_objective(&iqp.q, x).unwrap());
        }
        let again = solve(&iqp, &SolverConfig::default().with_workers(3)).unwrap();
        prop_assert_eq!(again, report);
    }

    /// A feasible point that cannot step along some kernel direction lies
    /// close to a constraint independent of the equations.
    #[test]
    fn shallow_points_sit_near_an_independent_constraint(
        (n, _q, a, b) in instance(),
        c in proptest::collection::vec(-2i64..=2, 3),
        d in -2i64..=2,
        with_equation in any::<bool>(),
    ) {
        let (cm, dv) = if with_equation {
            (matrix(1, n, &c[..n]), vec![int(d)])
        } else {
            (Matrix::empty(n), vec![])
        };
        prop_assume!(cm.rows() == 0 || !cm.entries().iter().all(Int::is_zero));
        let am = matrix(b.len(), n, &a);
        let bv: Vec<Int> = b.iter().map(|&v| int(v)).collect();
        let y = integer_kernel_basis(&cm).unwrap();
        let delta = if cm.rows() == 0 { Int::one() } else { max_abs_subdeterminant(&cm) };
        let alpha = am.max_abs_entry().max(Int::one());
        let slack = alpha * int(n as i64) * &delta * &delta;
        for x in cube(n, 4) {
            if !check_feasible(&am, &bv, &cm, &dv, &x).unwrap() {
                continue;
            }
            if let Classification::Shallow(_) = classify_solution(&x, &am, &bv, &cm, &dv, &y.y).unwrap() {
                let witness = am.row_iter().zip(&bv).any(|(row, bj)| {
                    let ax: Int = row.iter().zip(&x).map(|(u, v)| u * v).sum();
                    is_independent_row(&cm, row) && ax <= *bj && ax >= bj - &slack
                });
                prop_assert!(witness, "no witness row for {:?}", x);
            }
        }
    }

    /// When every kernel direction's objective row lies in the span of the
    /// equations, an optimum that can step both ways along a kernel column
    /// keeps its value.
    #[test]
    fn kernel_steps_from_a_flat_optimum_keep_the_value(
        (n, _q, a, b) in instance(),
        c in proptest::collection::vec(-2i64..=2, 3),
        u in proptest::collection::vec(-2i64..=2, 3),
        d in -2i64..=2,
    ) {
        let c = &c[..n];
        prop_assume!(c.iter().any(|&v| v != 0));
        // Q = u cᵀ + c uᵀ maps the kernel of c into the span of c.
        let q: Vec<i64> = (0..n * n).map(|k| u[k / n] * c[k % n] + c[k / n] * u[k % n]).collect();
        let iqp = boxed(n, &q, &a, &b);
        let cm = matrix(1, n, c);
        let dv = vec![int(d)];
        let kernel = integer_kernel_basis(&cm).unwrap();
        for yi in kernel.columns() {
            let row: Vec<Int> = (0..n).map(|j| (0..n).map(|i| &yi[i] * iqp.q.get(i, j)).sum::<Int>() * 2).collect();
            prop_assert!(!is_independent_row(&cm, &row));
        }
        let out = brute_force_with_equations(&iqp, Some((&cm, &dv)), &Box::cube(n, -3, 3).unwrap()).unwrap();
        if let SolveOutcome::Optimal { x, value } = out {
            for yi in kernel.columns() {
                let (up, down) = (plus(&x, &yi, 1), plus(&x, &yi, -1));
                let ok = |p: &[Int]| check_feasible(&iqp.a, &iqp.b, &cm, &dv, p).unwrap();
                if ok(&up) && ok(&down) {
                    prop_assert_eq!(evaluate_objective(&iqp.q, &up).unwrap(), value.to_integer());
                    prop_assert_eq!(evaluate_objective(&iqp.q, &down).unwrap(), value.to_integer());
                }
            }
        }
    }
}
