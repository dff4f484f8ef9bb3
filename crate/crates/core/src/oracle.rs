//! Brute-force ground truth.
//!
//! These routines deliberately share nothing with the solver beyond the
//! problem types: objective and feasibility are recomputed with plain loops.

use itertools::Itertools;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Iqp, SolveOutcome};
use crate::ola::{Arrangement, Graph};
use crate::{Int, IntMatrix, IntVector, Rat};

/// Largest number of lattice points the IQP oracle will enumerate.
pub const MAX_BOX_POINTS: u64 = 10_000_000;
/// Largest vertex count the arrangement oracle accepts.
pub const MAX_OLA_VERTICES: usize = 9;

/// Axis-aligned integer box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Box {
    pub lower: IntVector,
    pub upper: IntVector,
}

impl Box {
    pub fn new(lower: IntVector, upper: IntVector) -> Result<Self> {
        if lower.len() != upper.len() || lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::DimensionMismatch("box bounds must have equal length and lower ≤ upper".into()));
        }
        Ok(Box { lower, upper })
    }

    /// `[lo, hi]ⁿ`.
    pub fn cube(n: usize, lo: i64, hi: i64) -> Result<Self> {
        Box::new(vec![Int::from(lo); n], vec![Int::from(hi); n])
    }

    pub fn point_count(&self) -> Int {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l + 1).product()
    }
}

/// Exact minimum over the integer points of a box, optionally restricted by
/// equations `Cx = d`. Ties go to the lexicographically smallest point.
pub fn brute_force_iqp(iqp: &Iqp, bx: &Box) -> Result<SolveOutcome> {
    brute_force_with_equations(iqp, None, bx)
}

/// As [`brute_force_iqp`] with extra equations.
pub fn brute_force_with_equations(iqp: &Iqp, eq: Option<(&IntMatrix, &[Int])>, bx: &Box) -> Result<SolveOutcome> {
    let n = iqp.q.rows();
    if bx.lower.len() != n {
        return Err(Error::DimensionMismatch(format!("box has {} coordinates, problem has {n}", bx.lower.len())));
    }
    if bx.point_count() > Int::from(MAX_BOX_POINTS) {
        return Err(Error::ResourceExhausted { what: "box points", limit: MAX_BOX_POINTS });
    }
    let mut best: Option<(Int, IntVector)> = None;
    let mut x = bx.lower.clone();
    loop {
        if admissible(iqp, eq, &x) {
            let v = value(iqp, &x);
            // Points arrive in lexicographic order, so only a strict
            // improvement replaces the incumbent.
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, x.clone()));
            }
        }
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(match best {
                    None => SolveOutcome::Infeasible,
                    Some((v, x)) => SolveOutcome::Optimal { x, value: Rat::from_integer(v) },
                });
            }
            k -= 1;
            if x[k] < bx.upper[k] {
                x[k] += 1;
                break;
            }
            x[k] = bx.lower[k].clone();
        }
    }
}

fn value(iqp: &Iqp, x: &[Int]) -> Int {
    let n = x.len();
    let mut v = Int::zero();
    for i in 0..n {
        for j in 0..n {
            v += iqp.q.get(i, j) * &x[i] * &x[j];
        }
    }
    if let Some(l) = &iqp.linear {
        for i in 0..n {
            v += &l[i] * &x[i];
        }
    }
    if let Some(c) = &iqp.constant {
        v += c;
    }
    v
}

fn admissible(iqp: &Iqp, eq: Option<(&IntMatrix, &[Int])>, x: &[Int]) -> bool {
    for (i, bi) in iqp.b.iter().enumerate() {
        let lhs: Int = (0..x.len()).map(|j| iqp.a.get(i, j) * &x[j]).sum();
        if lhs > *bi {
            return false;
        }
    }
    if let Some((c, d)) = eq {
        for (i, di) in d.iter().enumerate() {
            let lhs: Int = (0..x.len()).map(|j| c.get(i, j) * &x[j]).sum();
            if lhs != *di {
                return false;
            }
        }
    }
    true
}

/// Cheapest arrangement by trying all `n!` of them. Among optimal ones the
/// lexicographically smallest position vector is returned.
pub fn brute_force_ola(g: &Graph) -> Result<(Arrangement, u64)> {
    let n = g.n();
    if n > MAX_OLA_VERTICES {
        return Err(Error::ResourceExhausted { what: "arrangement vertices", limit: MAX_OLA_VERTICES as u64 });
    }
    let mut best: Option<(u64, Vec<usize>)> = None;
    for positions in (1..=n).permutations(n) {
        let cost: u64 = g.edges().iter().map(|&(u, v)| positions[u].abs_diff(positions[v]) as u64).sum();
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, positions));
        }
    }
    let (cost, positions) = best.unwrap_or((0, Vec::new()));
    Ok((Arrangement::from_positions(positions)?, cost))
}
