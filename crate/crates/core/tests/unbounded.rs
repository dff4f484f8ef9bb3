use proptest::prelude::*;
use qiqp::linalg::rank;
use qiqp::model::normalize;
use qiqp::oracle::{brute_force_iqp, Box};
use qiqp::unbounded::{check_unbounded, collect_constraint_family, ray_certificate_from, UnboundedConfig, Verdict};
use qiqp::{int, Int, IntMatrix, Iqp, Matrix};

fn matrix(rows: usize, cols: usize, entries: &[i64]) -> IntMatrix {
    Matrix::new(rows, cols, entries.iter().map(|&v| int(v)).collect()).unwrap()
}

fn instance() -> impl Strategy<Value = Iqp> {
    (1usize..=2, 0usize..=2).prop_flat_map(|(n, m)| {
        (proptest::collection::vec(-2i64..=2, n * n), proptest::collection::vec(-2i64..=2, m * n), proptest::collection::vec(0i64..=3, m))
            .prop_map(move |(q, a, b)| Iqp::new(matrix(n, n, &q), matrix(m, n, &a), b.into_iter().map(int).collect()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The origin is feasible because `b ≥ 0`.
    #[test]
    fn rays_are_confirmed_by_the_line_check_and_by_growing_boxes(iqp in instance()) {
        let origin = vec![Int::from(0); iqp.n()];
        let Some(cert) = ray_certificate_from(&iqp, &origin, 2).unwrap() else {
            return Ok(());
        };
        prop_assert!(iqp.a.row_iter().all(|row| row.iter().zip(&cert.u).map(|(a, u)| a * u).sum::<Int>() <= Int::from(0)));
        let verdict = check_unbounded(&iqp, &UnboundedConfig::default()).unwrap();
        prop_assert!(matches!(verdict, Verdict::Unbounded(_)), "{:?}", verdict);
        let minima: Vec<_> = [2, 4, 8]
            .iter()
            .map(|&r| brute_force_iqp(&iqp, &Box::cube(iqp.n(), -r, r).unwrap()).unwrap().value().cloned().unwrap())
            .collect();
        prop_assert!(minima[0] > minima[1] && minima[1] > minima[2], "{:?}", minima);
    }

    #[test]
    fn family_ignores_the_right_hand_side(iqp in instance()) {
        let shifted = Iqp::new(iqp.q.clone(), iqp.a.clone(), iqp.b.iter().map(|v| v + 1000).collect()).unwrap();
        let family = |p: &Iqp| {
            let norm = normalize(p).unwrap().problem;
            collect_constraint_family(&norm.base.q, &norm.base.a, 10_000).unwrap()
        };
        prop_assert_eq!(family(&iqp), family(&shifted));
    }

    #[test]
    fn family_members_have_independent_rows(iqp in instance()) {
        let family = collect_constraint_family(&iqp.q, &iqp.a, 10_000).unwrap();
        prop_assert_eq!(&family.matrices[0], &Matrix::empty(iqp.n()));
        for c in &family.matrices {
            prop_assert_eq!(rank(c), c.rows());
            prop_assert!(family.delta_hat >= qiqp::linalg::max_abs_subdeterminant(c));
        }
        for t in family.terminals() {
            prop_assert_eq!(rank(t), t.cols());
        }
    }
}
