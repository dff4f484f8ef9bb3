//! Node-level building blocks of the search: branch enumeration, the base
//! case, and the two neighbourhood searches around the node's anchor point.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{is_independent_row, solve_unique_exact, Elimination, Matrix};
use crate::model::check_feasible;
use crate::{Int, IntMatrix, IntVector, Rat};

/// An affine subspace `{x : Cx = d}` reached after `depth` row additions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SearchNode {
    pub c: IntMatrix,
    pub d: IntVector,
    pub depth: usize,
}

impl SearchNode {
    pub fn root(c: IntMatrix, d: IntVector) -> Self {
        SearchNode { c, d, depth: 0 }
    }

    pub fn n(&self) -> usize {
        self.c.cols()
    }

    /// Child with one more equation.
    pub fn child(&self, row: &[Int], value: Int) -> Result<Self> {
        let mut d = self.d.clone();
        d.push(value);
        Ok(SearchNode { c: self.c.with_row(row)?, d, depth: self.depth + 1 })
    }
}

/// Inclusive integer range as a vector.
pub(crate) fn int_range(lo: &Int, hi: &Int) -> Vec<Int> {
    let mut out = Vec::new();
    let mut v = lo.clone();
    while &v <= hi {
        out.push(v.clone());
        v += 1;
    }
    out
}

/// Shallow branches with the worst-case value window: every row independent
/// of the node's equations, paired with every value in
/// `b_j - α·n·Δ² ..= b_j`.
pub fn enumerate_shallow_branches(
    node: &SearchNode,
    a: &IntMatrix,
    b: &[Int],
    alpha: &Int,
    delta: &Int,
) -> Vec<(IntVector, Int)> {
    let width = shallow_width(node.n(), alpha, delta);
    let mut out = Vec::new();
    for (row, bj) in a.row_iter().zip(b) {
        if is_independent_row(&node.c, row) {
            for v in int_range(&(bj - &width), bj) {
                out.push((row.to_vec(), v));
            }
        }
    }
    out
}

pub(crate) fn shallow_width(n: usize, alpha: &Int, delta: &Int) -> Int {
    alpha * Int::from(n) * delta * delta
}

pub(crate) fn deep_bound(n: usize, alpha: &Int, delta: &Int) -> Int {
    let d2 = delta * delta;
    Int::from(n * n) * &d2 * &d2 * alpha
}

/// `2 yᵀQ` as a row vector.
pub(crate) fn doubled_form_row(q: &IntMatrix, y: &[Int]) -> IntVector {
    (0..q.cols())
        .map(|k| {
            let s: Int = (0..q.rows()).map(|l| &y[l] * q.get(l, k)).sum();
            s * 2
        })
        .collect()
}

/// Deep branches with the worst-case value window: for every kernel column
/// `y` whose row `2yᵀQ` is independent of the node's equations, every value
/// in `-n²Δ⁴α ..= n²Δ⁴α`.
pub fn enumerate_deep_branches(
    node: &SearchNode,
    q: &IntMatrix,
    y: &IntMatrix,
    alpha: &Int,
    delta: &Int,
) -> Vec<(IntVector, Int)> {
    let bound = deep_bound(node.n(), alpha, delta);
    let mut out = Vec::new();
    for i in 0..y.cols() {
        let row = doubled_form_row(q, &y.column(i));
        if row.iter().all(|v| v.is_zero()) || !is_independent_row(&node.c, &row) {
            continue;
        }
        for z in int_range(&-bound.clone(), &bound) {
            out.push((row.clone(), z));
        }
    }
    out
}

/// The unique point of a node whose equations have full column rank, kept
/// if it is integral and satisfies `Ax ≤ b`.
pub fn base_case_solve(node: &SearchNode, a: &IntMatrix, b: &[Int]) -> Result<Option<IntVector>> {
    let Some(x) = solve_unique_exact(&node.c, &node.d)? else {
        return Err(Error::DependentRows);
    };
    if !x.iter().all(|v| v.is_integer()) {
        return Ok(None);
    }
    let x: IntVector = x.into_iter().map(|v| v.to_integer()).collect();
    let empty = Matrix::empty(x.len());
    Ok(check_feasible(a, b, &empty, &[], &x)?.then_some(x))
}

/// Every integer point within ℓ1 distance `radius` of `x0` that satisfies
/// the node's equations and `Ax ≤ b`, in lexicographic order.
///
/// Offsets are enumerated around the rounded centre up to norm
/// `radius + n` and filtered by the exact rational distance. Fails once more
/// than `limit` offsets have been generated.
pub fn local_search(
    node: &SearchNode,
    a: &IntMatrix,
    b: &[Int],
    x0: &[Rat],
    radius: &Int,
    limit: u64,
) -> Result<(Vec<IntVector>, u64)> {
    let n = node.n();
    let centre: IntVector = x0.iter().map(|v| v.round().to_integer()).collect();
    let reach = radius + Int::from(n);
    let radius_q = Rat::from_integer(radius.clone());
    let mut found = Vec::new();
    let mut visited = 0u64;
    let mut offset = vec![Int::zero(); n];
    let mut stack_err = None;
    enumerate_l1(0, &reach, &mut offset, &mut |off| {
        visited += 1;
        if visited > limit {
            stack_err = Some(Error::ResourceExhausted { what: "local search points", limit });
            return false;
        }
        let x: IntVector = centre.iter().zip(off).map(|(c, o)| c + o).collect();
        let dist: Rat = x.iter().zip(x0).map(|(xi, x0i)| (Rat::from_integer(xi.clone()) - x0i).abs()).sum();
        if dist <= radius_q && check_feasible(a, b, &node.c, &node.d, &x).unwrap_or(false) {
            found.push(x);
        }
        true
    });
    if let Some(e) = stack_err {
        return Err(e);
    }
    found.sort();
    Ok((found, visited))
}

/// Visit every integer vector with ℓ1 norm at most `budget` in the
/// coordinates from `k` on. Returns `false` once the visitor asks to stop.
fn enumerate_l1(k: usize, budget: &Int, offset: &mut [Int], visit: &mut impl FnMut(&[Int]) -> bool) -> bool {
    if k == offset.len() {
        return visit(offset);
    }
    for v in int_range(&-budget.clone(), budget) {
        let rest = budget - v.abs();
        offset[k] = v;
        if !enumerate_l1(k + 1, &rest, offset, visit) {
            return false;
        }
    }
    offset[k] = Int::zero();
    true
}

/// Integer points of `{x : Cx = d}` in the half-open box `x0 + Y·[-½, ½)^r`,
/// where `Y` is the determinantal kernel basis of `C`.
///
/// That basis restricted to the free columns is diagonal, so each free
/// coordinate ranges over exactly `|y_f[f]|` consecutive integers and the
/// pivot coordinates follow from the equations. Every coset of the lattice
/// spanned by `Y` inside the integer points of the subspace has exactly one
/// representative here.
pub fn coset_representatives(
    elimination: &Elimination<Int>,
    kernel: &[IntVector],
    n: usize,
    x0: &[Rat],
    limit: u64,
) -> Result<Vec<IntVector>> {
    let mut is_pivot = vec![false; n];
    for &p in &elimination.pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
    debug_assert_eq!(free.len(), kernel.len());
    let mut choices: Vec<(usize, Int, Int)> = Vec::with_capacity(free.len());
    let mut total = Int::one();
    for (y, &f) in kernel.iter().zip(&free) {
        let width = y[f].abs();
        let half = Rat::new(width.clone(), Int::from(2));
        let lo = (&x0[f] - half).ceil().to_integer();
        total *= &width;
        choices.push((f, lo, width));
    }
    if total > Int::from(limit) {
        return Err(Error::ResourceExhausted { what: "local search points", limit });
    }
    let rhs_col = n;
    let scale = &elimination.scale;
    let mut out = Vec::new();
    let mut x = vec![Int::zero(); n];
    let mut idx = vec![Int::zero(); choices.len()];
    loop {
        for (k, (f, lo, _)) in choices.iter().enumerate() {
            x[*f] = lo + &idx[k];
        }
        let mut integral = true;
        for (i, &p) in elimination.pivots.iter().enumerate() {
            let row = elimination.reduced.row(i);
            let mut num = row[rhs_col].clone();
            for &f in &free {
                num -= &row[f] * &x[f];
            }
            let (q, r) = num.div_rem(scale);
            if !r.is_zero() {
                integral = false;
                break;
            }
            x[p] = q;
        }
        if integral {
            out.push(x.clone());
        }
        // Odometer over the free coordinates.
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < choices[k].2 {
                break;
            }
            idx[k] = Int::zero();
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{augmented, dot, kernel_from_elimination};
    use crate::{int, int_matrix, int_vec};

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(int(n), int(d))
    }

    #[test]
    fn shallow_window_matches_worst_case_formula() {
        let node = SearchNode::root(Matrix::empty(2), vec![]);
        let a = int_matrix(2, &[&[1, 0]]);
        let br = enumerate_shallow_branches(&node, &a, &int_vec(&[7]), &int(1), &int(1));
        assert_eq!(br.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>(), int_vec(&[5, 6, 7]));
        let node = SearchNode::root(int_matrix(2, &[&[2, 0]]), int_vec(&[0]));
        assert!(enumerate_shallow_branches(&node, &a, &int_vec(&[7]), &int(1), &int(2)).is_empty());
        assert!(enumerate_shallow_branches(&node, &Matrix::empty(2), &[], &int(1), &int(2)).is_empty());
    }

    #[test]
    fn deep_window_matches_worst_case_formula() {
        let node = SearchNode::root(Matrix::empty(1), vec![]);
        let br = enumerate_deep_branches(&node, &int_matrix(1, &[&[2]]), &Matrix::identity(1), &int(2), &int(1));
        assert!(br.iter().all(|(r, _)| *r == int_vec(&[4])));
        assert_eq!(br.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>(), int_vec(&[-2, -1, 0, 1, 2]));
        let zero = int_matrix(2, &[&[0, 0], &[0, 0]]);
        let node2 = SearchNode::root(Matrix::empty(2), vec![]);
        assert!(enumerate_deep_branches(&node2, &zero, &Matrix::identity(2), &int(1), &int(1)).is_empty());
        let dep = SearchNode::root(int_matrix(1, &[&[1]]), int_vec(&[0]));
        assert!(enumerate_deep_branches(&dep, &int_matrix(1, &[&[2]]), &Matrix::identity(1), &int(2), &int(1)).is_empty());
    }

    #[test]
    fn local_search_examples() {
        let node = SearchNode::root(Matrix::empty(2), vec![]);
        let none = Matrix::empty(2);
        let (pts, _) = local_search(&node, &none, &[], &[q(0, 1), q(0, 1)], &int(1), 1000).unwrap();
        assert_eq!(pts, vec![int_vec(&[-1, 0]), int_vec(&[0, -1]), int_vec(&[0, 0]), int_vec(&[0, 1]), int_vec(&[1, 0])]);
        let node1 = SearchNode::root(Matrix::empty(1), vec![]);
        let (pts, _) = local_search(&node1, &Matrix::empty(1), &[], &[q(1, 2)], &int(1), 1000).unwrap();
        assert_eq!(pts, vec![int_vec(&[0]), int_vec(&[1])]);
        let (pts, _) = local_search(&node1, &Matrix::empty(1), &[], &[q(4, 1)], &int(0), 1000).unwrap();
        assert_eq!(pts, vec![int_vec(&[4])]);
        let a = int_matrix(1, &[&[1]]);
        let (pts, _) = local_search(&node1, &a, &int_vec(&[0]), &[q(0, 1)], &int(2), 1000).unwrap();
        assert_eq!(pts, vec![int_vec(&[-2]), int_vec(&[-1]), int_vec(&[0])]);
    }

    #[test]
    fn base_case_examples() {
        let node = SearchNode::root(Matrix::identity(2), int_vec(&[3, 4]));
        assert_eq!(base_case_solve(&node, &Matrix::empty(2), &[]).unwrap(), Some(int_vec(&[3, 4])));
        let half = SearchNode::root(int_matrix(1, &[&[2]]), int_vec(&[3]));
        assert_eq!(base_case_solve(&half, &Matrix::empty(1), &[]).unwrap(), None);
        let cut = SearchNode::root(Matrix::identity(1), int_vec(&[5]));
        assert_eq!(base_case_solve(&cut, &int_matrix(1, &[&[1]]), &int_vec(&[4])).unwrap(), None);
    }

    #[test]
    fn coset_representatives_cover_each_class_once() {
        // x + 2y = 1 over two variables: kernel (−2, 1), every integer
        // solution is (1 − 2y, y), a single coset.
        let c = int_matrix(2, &[&[1, 2]]);
        let e = Elimination::run(&augmented(&c, &int_vec(&[1])).unwrap(), 2);
        let k = kernel_from_elimination(&e, 2);
        let reps = coset_representatives(&e, &k, 2, &[q(1, 5), q(2, 5)], 100).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(dot(&[int(1), int(2)], &reps[0]), int(1));
        // 2x − 2y = 0 has kernel (1, 1); determinant scaling gives width 1.
        let c = int_matrix(2, &[&[2, -2]]);
        let e = Elimination::run(&augmented(&c, &int_vec(&[0])).unwrap(), 2);
        let k = kernel_from_elimination(&e, 2);
        assert_eq!(coset_representatives(&e, &k, 2, &[q(0, 1), q(0, 1)], 100).unwrap(), vec![int_vec(&[0, 0])]);
        // Empty system over two variables: the box is a single point.
        let e = Elimination::run(&Matrix::<Int>::zeros(0, 3), 2);
        let k = kernel_from_elimination(&e, 2);
        assert_eq!(coset_representatives(&e, &k, 2, &[q(1, 2), q(-1, 2)], 100).unwrap(), vec![int_vec(&[0, -1])]);
    }
}
