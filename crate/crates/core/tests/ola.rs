use std::collections::BTreeMap;

use proptest::prelude::*;
use qiqp::ola::{build_ola_iqp, min_vertex_cover, reconstruct_arrangement, GapAssignment, Graph};
use qiqp::{Int, Rat};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A graph on at most eight vertices with a vertex cover of at most three,
/// one ordering of a minimum cover, and a random split of each type over
/// the gaps.
fn sample(seed: u64) -> (Graph, Vec<usize>, GapAssignment) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(1..=8);
        let p = rng.gen_range(0.1..0.7);
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(p)).collect();
        let g = Graph::new(n, &edges).unwrap();
        let Some(mut order) = min_vertex_cover(&g, 3) else { continue };
        order.shuffle(&mut rng);
        let model = build_ola_iqp(&g, &order).unwrap();
        let k = order.len();
        let mut counts = BTreeMap::new();
        for (mask, members) in model.partition.active_types() {
            let mut row = vec![0u64; k + 1];
            for _ in members {
                row[rng.gen_range(0..=k)] += 1;
            }
            counts.insert(mask, row);
        }
        let assignment = GapAssignment::new(&model.partition, counts).unwrap();
        return (g, order, assignment);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn objective_equals_the_cost_of_the_rebuilt_arrangement(seed in any::<u64>()) {
        let (g, order, assignment) = sample(seed);
        let model = build_ola_iqp(&g, &order).unwrap();
        let arrangement = reconstruct_arrangement(&g, &order, &assignment).unwrap();
        prop_assert!(model.iqp.is_feasible(&model.point(&assignment)).unwrap());
        prop_assert_eq!(model.halved_value(&assignment).unwrap(), Rat::from_integer(Int::from(arrangement.cost(&g))));
    }

    #[test]
    fn rebuilt_arrangements_keep_each_group_together(seed in any::<u64>()) {
        let (g, order, assignment) = sample(seed);
        let model = build_ola_iqp(&g, &order).unwrap();
        let arrangement = reconstruct_arrangement(&g, &order, &assignment).unwrap();
        let cover_positions: Vec<usize> = order.iter().map(|&c| arrangement.position(c)).collect();
        prop_assert!(cover_positions.windows(2).all(|w| w[0] < w[1]), "cover out of order");
        for (mask, members) in model.partition.active_types() {
            let mut by_gap: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &v in members {
                let p = arrangement.position(v);
                by_gap.entry(cover_positions.iter().filter(|&&c| c < p).count()).or_default().push(p);
            }
            for (gap, mut positions) in by_gap {
                prop_assert_eq!(positions.len() as u64, assignment.count(mask, gap));
                positions.sort();
                prop_assert!(positions.windows(2).all(|w| w[1] == w[0] + 1), "type {:#b} split in gap {}", mask, gap);
            }
        }
    }
}
