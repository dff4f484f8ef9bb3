use std::time::Instant;

use qiqp::ola::{min_vertex_cover, solve_ola, Graph};
use qiqp::oracle::brute_force_ola;
use qiqp::solver::SolverConfig;
use rand::{Rng, SeedableRng};

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let config = SolverConfig::default();
    let mut done = 0;
    let total = Instant::now();
    while done < 30 {
        let n = rng.gen_range(2..=8);
        let p: f64 = rng.gen_range(0.2..0.8);
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(p)).collect();
        let g = Graph::new(n, &edges).unwrap();
        let Some(c) = min_vertex_cover(&g, 4) else { continue };
        let t = Instant::now();
        let s = solve_ola(&g, 4, &config).unwrap().unwrap();
        let el = t.elapsed();
        let (_, b) = brute_force_ola(&g).unwrap();
        println!("n={n} m={} k={} cost={} brute={} nodes={} {:?}", edges.len(), c.len(), s.cost, b, s.nodes, el);
        assert_eq!(s.cost, b);
        done += 1;
    }
    println!("total {:?}", total.elapsed());
}
