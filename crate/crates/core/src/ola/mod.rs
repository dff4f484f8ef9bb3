//! Optimal linear arrangement for graphs with a small vertex cover.
//!
//! Fix a minimum cover and an order `c₁ … c_k` of it. Every other vertex is
//! independent, so it is described by its neighbourhood (its *type*, stored
//! as a bitmask with bit `j−1` set iff `c_j` is a neighbour) and by the gap
//! between consecutive cover vertices it sits in. Some optimal arrangement
//! keeps every (type, gap) group contiguous and orders the groups within a gap
//! by force, so its cost is a quadratic function of the group sizes. One IQP
//! per cover order yields the optimum.
//!
//! All objectives here are doubled so that they have integer coefficients.

mod graph;

use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

pub use graph::{Arrangement, Graph};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{Iqp, SolveOutcome};
use crate::solver::{self, SolverConfig};
use crate::{Int, IntVector, Rat};

/// Type bitmask relative to an ordered cover.
pub type TypeMask = u64;

/// Largest cover the bitmask representation supports.
pub const MAX_COVER: usize = 63;

/// Smallest vertex cover of size at most `k_max`, or `None`.
///
/// Branches on the first uncovered edge, trying the smaller endpoint first,
/// with iterative deepening on the size. Every minimum cover is a leaf of the
/// search at the right depth, so taking the lexicographically smallest leaf
/// makes the answer canonical.
pub fn min_vertex_cover(g: &Graph, k_max: usize) -> Option<Vec<usize>> {
    let mut chosen = vec![false; g.n()];
    for k in 0..=k_max.min(g.n()) {
        let mut best = None;
        cover_leaves(g, &mut chosen, k, &mut best);
        if best.is_some() {
            return best;
        }
    }
    None
}

fn cover_leaves(g: &Graph, chosen: &mut [bool], budget: usize, best: &mut Option<Vec<usize>>) {
    let Some(&(u, v)) = g.edges().iter().find(|&&(u, v)| !chosen[u] && !chosen[v]) else {
        let cover: Vec<usize> = (0..g.n()).filter(|&i| chosen[i]).collect();
        if best.as_ref().is_none_or(|b| cover < *b) {
            *best = Some(cover);
        }
        return;
    };
    if budget == 0 {
        return;
    }
    for w in [u, v] {
        chosen[w] = true;
        cover_leaves(g, chosen, budget - 1, best);
        chosen[w] = false;
    }
}

/// Independent vertices grouped by neighbourhood, relative to an ordered
/// cover. The empty type holds vertices without neighbours.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypePartition {
    order: Vec<usize>,
    types: BTreeMap<TypeMask, Vec<usize>>,
}

impl TypePartition {
    /// Cover vertices in their assigned order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn k(&self) -> usize {
        self.order.len()
    }

    /// Nonempty groups in ascending mask order, each with ascending ids.
    pub fn types(&self) -> impl Iterator<Item = (TypeMask, &[usize])> {
        self.types.iter().map(|(m, v)| (*m, v.as_slice()))
    }

    pub fn members(&self, mask: TypeMask) -> &[usize] {
        self.types.get(&mask).map_or(&[], |v| v.as_slice())
    }

    /// Types that take part in the optimisation, i.e. all but the empty one.
    pub fn active_types(&self) -> impl Iterator<Item = (TypeMask, &[usize])> {
        self.types().filter(|(m, _)| *m != 0)
    }
}

/// Group the vertices outside `order` by neighbourhood.
pub fn partition_types(g: &Graph, order: &[usize]) -> Result<TypePartition> {
    if order.len() > MAX_COVER {
        return Err(Error::ResourceExhausted { what: "cover size", limit: MAX_COVER as u64 });
    }
    let mut index = vec![None; g.n()];
    for (j, &c) in order.iter().enumerate() {
        if c >= g.n() || index[c].is_some() {
            return Err(Error::DimensionMismatch(format!("cover vertex {c} is out of range or repeated")));
        }
        index[c] = Some(j);
    }
    let mut types: BTreeMap<TypeMask, Vec<usize>> = BTreeMap::new();
    for v in (0..g.n()).filter(|&v| index[v].is_none()) {
        let mut mask = 0;
        for &u in g.neighbors(v) {
            match index[u] {
                Some(j) => mask |= 1 << j,
                None => return Err(Error::NotACover(v.min(u), v.max(u))),
            }
        }
        types.entry(mask).or_default().push(v);
    }
    Ok(TypePartition { order: order.to_vec(), types })
}

fn contains(mask: TypeMask, j: usize) -> bool {
    mask >> (j - 1) & 1 == 1
}

/// Right neighbours minus left neighbours of a vertex of type `mask` placed
/// in gap `gap`. Cover indices `j` run from 1 to `k`; gap `i` lies between
/// `c_i` and `c_{i+1}`.
pub fn force(mask: TypeMask, gap: usize, k: usize) -> i64 {
    (1..=k).filter(|&j| contains(mask, j)).map(|j| if j > gap { 1 } else { -1 }).sum()
}

/// Cover vertices strictly between a vertex in gap `gap` and `c_j`.
pub fn f_count(gap: usize, j: usize, _k: usize) -> i64 {
    if j > gap { (j - gap - 1) as i64 } else { (gap - j) as i64 }
}

/// Block order inside one gap.
fn block_key(mask: TypeMask, gap: usize, k: usize) -> (i64, TypeMask) {
    (force(mask, gap, k), mask)
}

/// 1 when the edges from the `(gap, mask)` block to `c_j` pass over the whole
/// `(other_gap, other_mask)` block, else 0.
pub fn g_indicator(gap: usize, j: usize, mask: TypeMask, other_gap: usize, other_mask: TypeMask, k: usize) -> i64 {
    if !contains(mask, j) || (gap, mask) == (other_gap, other_mask) {
        return 0;
    }
    let right = j > gap;
    let between = if other_gap != gap {
        if right { gap < other_gap && other_gap < j } else { j <= other_gap && other_gap < gap }
    } else {
        let own = block_key(mask, gap, k);
        let other = block_key(other_mask, gap, k);
        if right { other > own } else { other < own }
    };
    between as i64
}

/// Group sizes per (type, gap), for the non-empty types.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GapAssignment {
    counts: BTreeMap<TypeMask, Vec<u64>>,
}

impl GapAssignment {
    /// Checks non-negativity implicitly and that each row sums to the group
    /// size.
    pub fn new(partition: &TypePartition, counts: BTreeMap<TypeMask, Vec<u64>>) -> Result<Self> {
        let k = partition.k();
        let expected: Vec<TypeMask> = partition.active_types().map(|(m, _)| m).collect();
        if counts.keys().copied().collect::<Vec<_>>() != expected {
            return Err(Error::DimensionMismatch("assignment types differ from the partition".into()));
        }
        for (mask, row) in &counts {
            if row.len() != k + 1 || row.iter().sum::<u64>() != partition.members(*mask).len() as u64 {
                return Err(Error::DimensionMismatch(format!("bad gap counts for type {mask:#b}")));
            }
        }
        Ok(GapAssignment { counts })
    }

    pub fn count(&self, mask: TypeMask, gap: usize) -> u64 {
        self.counts.get(&mask).map_or(0, |row| row[gap])
    }

    pub fn counts(&self) -> &BTreeMap<TypeMask, Vec<u64>> {
        &self.counts
    }
}

/// The IQP for one cover order, with its variable layout.
#[derive(Clone, Debug)]
pub struct OlaIqp {
    pub iqp: Iqp,
    pub partition: TypePartition,
    /// `(mask, gap)` of each variable, types ascending then gaps ascending.
    pub variables: Vec<(TypeMask, usize)>,
}

impl OlaIqp {
    pub fn point(&self, assignment: &GapAssignment) -> IntVector {
        self.variables.iter().map(|&(m, i)| Int::from(assignment.count(m, i))).collect()
    }

    pub fn assignment(&self, x: &[Int]) -> Result<GapAssignment> {
        let k = self.partition.k();
        let mut counts: BTreeMap<TypeMask, Vec<u64>> =
            self.partition.active_types().map(|(m, _)| (m, vec![0; k + 1])).collect();
        for (&(m, i), v) in self.variables.iter().zip(x) {
            counts.get_mut(&m).expect("known type")[i] =
                v.to_u64().ok_or_else(|| Error::DimensionMismatch("negative group size".into()))?;
        }
        GapAssignment::new(&self.partition, counts)
    }

    /// Arrangement cost predicted by the objective.
    pub fn halved_value(&self, assignment: &GapAssignment) -> Result<Rat> {
        let doubled = self.iqp.objective(&self.point(assignment))?;
        Ok(Rat::new(doubled, Int::from(2)))
    }

    /// Coefficients of the doubled objective attached to variables: each
    /// square, each product of two distinct variables and each linear term.
    pub fn coefficients(&self) -> Vec<Int> {
        let n = self.iqp.n();
        let mut out = Vec::new();
        for u in 0..n {
            out.push(self.iqp.q.get(u, u).clone());
            for v in u + 1..n {
                out.push(self.iqp.q.get(u, v) + self.iqp.q.get(v, u));
            }
        }
        out.extend(self.iqp.linear.iter().flatten().cloned());
        out
    }
}

/// `2^{k+2}·k²`, the bound on every variable coefficient of the doubled
/// objective.
pub fn coefficient_bound(k: usize) -> Int {
    (Int::from(1) << (k + 2)) * Int::from(k * k)
}

/// Build the doubled-objective IQP for the cover listed in `order`.
///
/// The cost is `|E|` plus, for every edge, the number of vertices strictly
/// between its endpoints. Cover-cover edges pass over the cover vertices and
/// all groups in the gaps between them. An edge from a group vertex to `c_j`
/// passes over `f_count` cover vertices, over every group the indicator
/// selects, and over the members of its own group that lie on the `c_j` side,
/// which sums to `C(x, 2)` per neighbour.
pub fn build_ola_iqp(g: &Graph, order: &[usize]) -> Result<OlaIqp> {
    let partition = partition_types(g, order)?;
    let k = order.len();
    let mut position = vec![0usize; g.n()];
    for (j, &c) in order.iter().enumerate() {
        position[c] = j + 1;
    }
    let mut constant = g.edges().len() as i64;
    let mut covered = vec![0i64; k + 1];
    for &(u, v) in g.edges() {
        let (a, b) = (position[u], position[v]);
        if a == 0 || b == 0 {
            continue;
        }
        let (a, b) = (a.min(b), a.max(b));
        constant += (b - a - 1) as i64;
        for gap in covered.iter_mut().take(b).skip(a) {
            *gap += 1;
        }
    }
    let variables: Vec<(TypeMask, usize)> =
        partition.active_types().flat_map(|(m, _)| (0..=k).map(move |i| (m, i))).collect();
    let nv = variables.len();
    let mut q = vec![0i64; nv * nv];
    let mut linear = vec![0i64; nv];
    for (u, &(mask, gap)) in variables.iter().enumerate() {
        let size = mask.count_ones() as i64;
        let flights: i64 = (1..=k).filter(|&j| contains(mask, j)).map(|j| f_count(gap, j, k)).sum();
        q[u * nv + u] = size;
        linear[u] = 2 * covered[gap] + 2 * flights - size;
        for (v, &(other_mask, other_gap)) in variables.iter().enumerate() {
            if v == u {
                continue;
            }
            let over: i64 = (1..=k).map(|j| g_indicator(gap, j, mask, other_gap, other_mask, k)).sum();
            q[u * nv + v] += over;
            q[v * nv + u] += over;
        }
    }
    let mut a_rows = Vec::new();
    let mut b = Vec::new();
    for u in 0..nv {
        let mut row = vec![Int::zero(); nv];
        row[u] = Int::from(-1);
        a_rows.push(row);
        b.push(Int::zero());
    }
    for (mask, members) in partition.active_types() {
        let row: Vec<Int> = variables.iter().map(|&(m, _)| Int::from((m == mask) as i64)).collect();
        a_rows.push(row.iter().map(|v| -v).collect());
        b.push(-Int::from(members.len()));
        a_rows.push(row);
        b.push(Int::from(members.len()));
    }
    let iqp = Iqp::new(
        Matrix::new(nv, nv, q.into_iter().map(Int::from).collect())?,
        Matrix::from_rows(nv, a_rows)?,
        b,
    )?
    .with_linear(linear.into_iter().map(Int::from).collect())?
    .with_constant(Int::from(2 * constant));
    Ok(OlaIqp { iqp, partition, variables })
}

/// Lay the groups out: gap 0, `c₁`, gap 1, …, `c_k`, gap k, then the
/// vertices without neighbours. Groups inside a gap are ordered by force,
/// ties by mask; each group takes its members in id order.
pub fn reconstruct_arrangement(g: &Graph, order: &[usize], assignment: &GapAssignment) -> Result<Arrangement> {
    let partition = partition_types(g, order)?;
    let k = order.len();
    let mut used: BTreeMap<TypeMask, usize> = BTreeMap::new();
    let mut line = Vec::with_capacity(g.n());
    for gap in 0..=k {
        let mut blocks: Vec<TypeMask> = partition.active_types().map(|(m, _)| m).collect();
        blocks.sort_by_key(|&m| block_key(m, gap, k));
        for mask in blocks {
            let take = assignment.count(mask, gap) as usize;
            let start = used.entry(mask).or_insert(0);
            let members = partition.members(mask);
            if *start + take > members.len() {
                return Err(Error::DimensionMismatch(format!("type {mask:#b} over-assigned")));
            }
            line.extend_from_slice(&members[*start..*start + take]);
            *start += take;
        }
        if gap < k {
            line.push(order[gap]);
        }
    }
    line.extend_from_slice(partition.members(0));
    Arrangement::from_order(&line)
}

/// Result of [`solve_ola`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OlaSolution {
    pub arrangement: Arrangement,
    pub cost: u64,
    /// Cover order whose IQP gave the optimum.
    pub order: Vec<usize>,
    pub assignment: GapAssignment,
    /// Search nodes summed over all cover orders.
    pub nodes: u64,
    /// Largest variable coefficient magnitude over all generated objectives.
    pub max_coefficient: Int,
}

struct OrderResult {
    cost: u64,
    assignment: GapAssignment,
    nodes: u64,
    max_coefficient: Int,
}

fn solve_order(g: &Graph, order: &[usize], config: &SolverConfig) -> Result<OrderResult> {
    let built = build_ola_iqp(g, order)?;
    let max_coefficient = built.coefficients().into_iter().map(|c| num_traits::Signed::abs(&c)).max().unwrap_or_default();
    let report = solver::solve(&built.iqp, config)?;
    let SolveOutcome::Optimal { x, value } = report.outcome else {
        panic!("arrangement IQP has a feasible box, got {:?}", report.outcome);
    };
    let halved = value / Rat::from_integer(Int::from(2));
    assert!(halved.is_integer(), "arrangement cost must be integral, got {halved}");
    let cost = halved.to_integer().to_u64().expect("cost is non-negative");
    Ok(OrderResult { cost, assignment: built.assignment(&x)?, nodes: report.stats.nodes, max_coefficient })
}

/// Optimal arrangement when a vertex cover of size at most `k_max` exists.
///
/// Tries the orders of the canonical minimum cover lexicographically, up to
/// reversal. The cheapest order wins, ties going to the earlier one. The reconstructed
/// arrangement is checked against the objective value before returning.
pub fn solve_ola(g: &Graph, k_max: usize, config: &SolverConfig) -> Result<Option<OlaSolution>> {
    let Some(cover) = min_vertex_cover(g, k_max) else {
        return Ok(None);
    };
    // An order and its reverse give mirrored layouts of equal cost, so only
    // the lexicographically smaller of the two is solved. It also comes
    // first, which keeps the tie-break unchanged.
    let orders: Vec<Vec<usize>> = cover
        .iter()
        .copied()
        .permutations(cover.len())
        .filter(|o| o.iter().le(o.iter().rev()))
        .collect();
    let inner = config.clone().with_workers(1);
    let results: Vec<Result<OrderResult>> = if config.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|_| Error::ResourceExhausted { what: "worker threads", limit: config.workers as u64 })?;
        pool.install(|| orders.par_iter().map(|o| solve_order(g, o, &inner)).collect())
    } else {
        orders.iter().map(|o| solve_order(g, o, &inner)).collect()
    };
    let mut best: Option<(u64, usize)> = None;
    let mut nodes = 0;
    let mut max_coefficient = Int::zero();
    let mut solved = Vec::with_capacity(results.len());
    for (index, r) in results.into_iter().enumerate() {
        let r = r?;
        nodes += r.nodes;
        max_coefficient = max_coefficient.max(r.max_coefficient.clone());
        if best.is_none_or(|(c, _)| r.cost < c) {
            best = Some((r.cost, index));
        }
        solved.push(r);
    }
    let (cost, index) = best.expect("at least one cover order");
    let order = orders[index].clone();
    let assignment = solved.swap_remove(index).assignment;
    let arrangement = reconstruct_arrangement(g, &order, &assignment)?;
    assert_eq!(arrangement.cost(g), cost, "reconstructed arrangement disagrees with the objective for order {order:?}");
    Ok(Some(OlaSolution { arrangement, cost, order, assignment, nodes, max_coefficient }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Graph {
        Graph::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn covers() {
        assert_eq!(min_vertex_cover(&p3(), 3), Some(vec![1]));
        let k3 = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(min_vertex_cover(&k3, 3), Some(vec![0, 1]));
        assert_eq!(min_vertex_cover(&k3, 1), None);
        assert_eq!(min_vertex_cover(&Graph::new(4, &[]).unwrap(), 0), Some(vec![]));
    }

    #[test]
    fn types() {
        let star = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let p = partition_types(&star, &[0]).unwrap();
        assert_eq!(p.types().collect::<Vec<_>>(), vec![(1, &[1, 2, 3][..])]);
        let p4 = Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let p = partition_types(&p4, &[1, 2]).unwrap();
        assert_eq!(p.types().collect::<Vec<_>>(), vec![(0b01, &[0][..]), (0b10, &[3][..])]);
        let g = Graph::new(3, &[(0, 1)]).unwrap();
        assert_eq!(partition_types(&g, &[0]).unwrap().members(0), &[2]);
        assert_eq!(partition_types(&p4, &[1]), Err(Error::NotACover(2, 3)));
    }

    #[test]
    fn force_and_flights() {
        assert_eq!(force(0b101, 1, 3), 0);
        for k in 0..=4usize {
            for mask in 0..(1u64 << k) {
                assert_eq!(force(mask, 0, k), mask.count_ones() as i64);
                assert_eq!(force(mask, k, k), -(mask.count_ones() as i64));
            }
        }
        assert_eq!(f_count(1, 3, 3), 1);
        assert_eq!(f_count(0, 1, 3), 0);
        assert_eq!(f_count(2, 1, 3), 1);
    }

    #[test]
    fn indicator_examples() {
        for other in [0b01, 0b10, 0b11] {
            assert_eq!(g_indicator(0, 2, 0b10, 1, other, 2), 1);
        }
        assert_eq!(g_indicator(1, 2, 0b10, 1, 0b01, 2), 0);
        assert_eq!(g_indicator(1, 1, 0b10, 0, 0b01, 2), 0);
    }

    #[test]
    fn path_of_three() {
        let built = build_ola_iqp(&p3(), &[1]).unwrap();
        assert_eq!(built.variables, vec![(1, 0), (1, 1)]);
        let half = |a, b| {
            let asg = GapAssignment::new(&built.partition, BTreeMap::from([(1, vec![a, b])])).unwrap();
            built.halved_value(&asg).unwrap()
        };
        assert_eq!(half(1, 1), Rat::from_integer(Int::from(2)));
        assert_eq!(half(2, 0), Rat::from_integer(Int::from(3)));
        let asg = GapAssignment::new(&built.partition, BTreeMap::from([(1, vec![1, 1])])).unwrap();
        assert_eq!(reconstruct_arrangement(&p3(), &[1], &asg).unwrap().positions(), &[1, 2, 3]);
    }

    #[test]
    fn edgeless_layout_is_identity() {
        let g = Graph::new(4, &[]).unwrap();
        let built = build_ola_iqp(&g, &[]).unwrap();
        assert_eq!(built.iqp.n(), 0);
        let a = reconstruct_arrangement(&g, &[], &GapAssignment::default()).unwrap();
        assert_eq!(a.positions(), &[1, 2, 3, 4]);
    }

    #[test]
    fn small_optima() {
        let config = SolverConfig::default();
        let cost = |g: &Graph| solve_ola(g, 8, &config).unwrap().unwrap().cost;
        assert_eq!(cost(&p3()), 2);
        assert_eq!(cost(&Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()), 4);
        assert_eq!(cost(&Graph::new(2, &[(0, 1)]).unwrap()), 1);
        assert_eq!(cost(&Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()), 4);
        assert_eq!(cost(&Graph::new(3, &[]).unwrap()), 0);
        assert!(solve_ola(&p3(), 0, &config).unwrap().is_none());
    }
}
