//! Deciding whether an IQP is unbounded below.
//!
//! Bound every variable by `±λ`. For large `λ` the boxed problem is feasible
//! and bounded, and the search reaches its optimum from some system `Cx = d`
//! that the branching can build from `Q` and the boxed constraint matrix
//! alone. Splitting `d` into a part from `b`, a part proportional to `λ` and
//! a bounded correction puts every such optimum on a line `λu + w` drawn
//! from a finite list. The problem is unbounded exactly when the objective
//! is unbounded along one of those lines, which is a question about one
//! integer variable.
//!
//! The list is finite but enormous, so enumeration is budgeted and running
//! out yields [`Verdict::Unknown`]. A cheap search for an improving ray runs
//! first.

mod family;
mod univariate;

use num_traits::{One, Signed, Zero};

pub use family::{collect_constraint_family, ConstraintFamily, DEFAULT_FAMILY_BUDGET};
pub use univariate::{integral_progression, line_problem, univariate_iqp, Progression, UnivariateOutcome};

use crate::error::{Error, Result};
use crate::linalg::{determinant, dot, rat_mul_vec, right_inverse, to_rational};
use crate::model::{normalize, Iqp, SolveOutcome};
use crate::solver::{self, SearchStats, SolveReport, SolverConfig};
use crate::{Int, IntMatrix, IntVector, Rat, RatVector};

/// Default cap on examined combinations.
pub const DEFAULT_COMBINATION_BUDGET: u64 = 1_000_000;
/// Default `|u|∞` range of the ray search.
pub const DEFAULT_RAY_BOUND: i64 = 3;

/// `x(λ) = λ·direction + offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateLine {
    pub direction: RatVector,
    pub offset: RatVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Bounded,
    Unbounded(CandidateLine),
    /// The combination budget ran out first.
    Unknown,
}

/// Integer vectors enumerated centre-first: each coordinate runs through
/// `0, 1, −1, 2, −2, …`, the last one fastest.
#[derive(Clone, Debug)]
struct Grid {
    steps: Vec<u64>,
    radius: u64,
    /// Bound the ℓ1 norm instead of each coordinate.
    l1: bool,
    done: bool,
}

fn zigzag(step: u64) -> i64 {
    let half = step.div_ceil(2) as i64;
    if step % 2 == 1 { half } else { -half }
}

impl Grid {
    fn new(dims: usize, radius: u64, l1: bool) -> Self {
        Grid { steps: vec![0; dims], radius, l1, done: false }
    }

    fn limit(&self, i: usize) -> u64 {
        let used: u64 = if self.l1 { self.steps[..i].iter().map(|&s| s.div_ceil(2)).sum() } else { 0 };
        2 * (self.radius - used)
    }
}

impl Iterator for Grid {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let out = self.steps.iter().map(|&s| zigzag(s)).collect();
        self.done = true;
        for i in (0..self.steps.len()).rev() {
            if self.steps[i] < self.limit(i) {
                self.steps[i] += 1;
                for s in &mut self.steps[i + 1..] {
                    *s = 0;
                }
                self.done = false;
                break;
            }
        }
        Some(out)
    }
}

fn to_u64(v: &Int, what: &'static str) -> Result<u64> {
    use num_traits::ToPrimitive;
    v.to_u64().filter(|&x| x < u64::MAX / 4).ok_or(Error::ResourceExhausted { what, limit: u64::MAX / 4 })
}

/// Offsets `C⁺v₀ + v₁` for integer `v₀` with `|v₀|∞ ≤ n²Δ̂⁴α` and `v₁` with
/// denominator `det(CCᵀ)` and `|v₁|₁ ≤ Δ̂²n`, lazily and centre-first.
pub fn enumerate_candidate_vectors(
    c: &IntMatrix,
    delta_hat: &Int,
    alpha: &Int,
    n: usize,
) -> Result<impl Iterator<Item = RatVector>> {
    let inverse = right_inverse(c)?;
    let den = determinant(&c.matmul(&c.transpose())?)?;
    let nn = Int::from(n);
    let d2 = delta_hat * delta_hat;
    let r0 = to_u64(&(&nn * &nn * &d2 * &d2 * alpha), "candidate grid radius")?;
    let r1 = to_u64(&(&d2 * &nn * &den), "candidate grid radius")?;
    let cols = c.cols();
    let den = Rat::from_integer(den);
    Ok(Grid::new(c.rows(), r0, false).flat_map(move |v0| {
        let base = rat_mul_vec(&inverse, &to_rational(&v0.into_iter().map(Int::from).collect::<Vec<_>>()));
        let den = den.clone();
        Grid::new(cols, r1, true).map(move |v1| {
            base.iter().zip(v1).map(|(b, k)| b + Rat::from_integer(Int::from(k)) / &den).collect()
        })
    }))
}

/// The normalized problem with every equation written as two inequalities.
fn inequality_form(iqp: &Iqp) -> Result<(IntMatrix, IntMatrix, IntVector)> {
    let normalized = normalize(iqp)?;
    let p = normalized.problem;
    let mut a = p.base.a.clone();
    let mut b = p.base.b.clone();
    for (row, v) in p.c.row_iter().zip(&p.d) {
        a.push_row(row)?;
        b.push(v.clone());
        a.push_row(&row.iter().map(|x| -x).collect::<Vec<_>>())?;
        b.push(-v);
    }
    Ok((p.base.q, a, b))
}

/// Budgets for [`check_unbounded`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnboundedConfig {
    pub combination_budget: u64,
    pub family_budget: usize,
}

impl Default for UnboundedConfig {
    fn default() -> Self {
        UnboundedConfig { combination_budget: DEFAULT_COMBINATION_BUDGET, family_budget: DEFAULT_FAMILY_BUDGET }
    }
}

/// Decide unboundedness of a feasible IQP by trying every candidate line.
///
/// Directions are screened before any offset is enumerated: a line can only
/// be unbounded if `u ≠ 0`, `uᵀQu ≤ 0` and `λ` may grow without limit on
/// some side, i.e. `Au ≤ 0` or `Au ≥ 0`. The screen follows from the shape
/// of the one-variable problem and does not change the verdict. So does
/// dropping directions along which the objective is constant.
pub fn check_unbounded(iqp: &Iqp, config: &UnboundedConfig) -> Result<Verdict> {
    let (q, a, b) = inequality_form(iqp)?;
    let n = q.cols();
    let mut boxed = a.clone();
    for sign in [1, -1] {
        for i in 0..n {
            let mut row = vec![Int::zero(); n];
            row[i] = Int::from(sign);
            boxed.push_row(&row)?;
        }
    }
    let alpha = q.max_abs_entry().max(boxed.max_abs_entry()).max(Int::one());
    let family = match collect_constraint_family(&q, &boxed, config.family_budget) {
        Ok(f) => f,
        Err(Error::ResourceExhausted { .. }) => return Ok(Verdict::Unknown),
        Err(e) => return Err(e),
    };
    let mut values: Vec<Int> = std::iter::once(Int::zero()).chain(b.iter().cloned()).collect();
    values.sort();
    values.dedup();
    let mut used = 0u64;
    let mut spend = || {
        used += 1;
        used <= config.combination_budget
    };
    // One stream of offsets per (system, direction, share of b). Streams are
    // drawn from in turn so that no single stream can use up the budget.
    let mut streams: Vec<(RatVector, RatVector, Box<dyn Iterator<Item = RatVector>>)> = Vec::new();
    for c in family.matrices.iter().filter(|c| c.rows() > 0) {
        let r = c.rows();
        let inverse = right_inverse(c)?;
        for mask in 1u64..(1 << r) {
            if !spend() {
                return Ok(Verdict::Unknown);
            }
            let d1: Vec<Rat> = (0..r).map(|i| Rat::from_integer(Int::from((mask >> i) & 1))).collect();
            let u = rat_mul_vec(&inverse, &d1);
            if !direction_may_escape(&q, &a, &u) {
                continue;
            }
            // Entries fed by λ hold no share of b.
            let free: Vec<usize> = (0..r).filter(|i| (mask >> i) & 1 == 0).collect();
            let mut choice = vec![0usize; free.len()];
            loop {
                let mut db = vec![Rat::zero(); r];
                for (k, &i) in free.iter().enumerate() {
                    db[i] = Rat::from_integer(values[choice[k]].clone());
                }
                let base = rat_mul_vec(&inverse, &db);
                let offsets = enumerate_candidate_vectors(c, &family.delta_hat, &alpha, n)?;
                streams.push((u.clone(), base, Box::new(offsets)));
                let Some(k) = (0..choice.len()).rev().find(|&k| choice[k] + 1 < values.len()) else {
                    break;
                };
                choice[k] += 1;
                for c in &mut choice[k + 1..] {
                    *c = 0;
                }
            }
        }
    }
    while !streams.is_empty() {
        let mut i = 0;
        while i < streams.len() {
            let (u, base, offsets) = &mut streams[i];
            let Some(v) = offsets.next() else {
                drop(streams.remove(i));
                continue;
            };
            if !spend() {
                return Ok(Verdict::Unknown);
            }
            let w: RatVector = base.iter().zip(&v).map(|(x, y)| x + y).collect();
            if line_problem(&q, &a, &b, u, &w) == UnivariateOutcome::Unbounded {
                return Ok(Verdict::Unbounded(CandidateLine { direction: u.clone(), offset: w }));
            }
            i += 1;
        }
    }
    Ok(Verdict::Bounded)
}

fn direction_may_escape(q: &IntMatrix, a: &IntMatrix, u: &[Rat]) -> bool {
    if u.iter().all(|v| v.is_zero()) {
        return false;
    }
    let qm = q.map(|v| Rat::from_integer(v.clone()));
    let qu = rat_mul_vec(&qm, u);
    let curvature: Rat = u.iter().zip(&qu).map(|(x, y)| x * y).sum();
    if curvature.is_positive() {
        return false;
    }
    // Zero curvature and a zero gradient along u: the objective is constant
    // on every parallel line.
    let qtu = rat_mul_vec(&qm.transpose(), u);
    if curvature.is_zero() && qu.iter().zip(&qtu).all(|(x, y)| (x + y).is_zero()) {
        return false;
    }
    let au: Vec<Rat> = a.row_iter().map(|row| row.iter().zip(u).map(|(x, y)| y * x).sum()).collect();
    au.iter().all(|v| !v.is_positive()) || au.iter().all(|v| !v.is_negative())
}

/// A feasible point and a direction along which it stays feasible while the
/// objective decreases without bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayCertificate {
    pub x: IntVector,
    pub u: IntVector,
}

/// Look for `u` with `|u|∞ ≤ bound`, `Au ≤ 0`, and either `uᵀQu < 0` or
/// `uᵀQu = 0` with the objective's slope at `x` along `u` negative. Finding
/// none proves nothing.
pub fn ray_certificate_from(iqp: &Iqp, x: &[Int], bound: i64) -> Result<Option<RayCertificate>> {
    let n = iqp.n();
    if !iqp.is_feasible(x)? {
        return Err(Error::InfeasiblePoint);
    }
    let symmetric: IntMatrix = crate::model::symmetrize(&iqp.q)?;
    let zero = vec![Int::zero(); n];
    let linear = iqp.linear.as_deref().unwrap_or(&zero);
    let mut u = vec![-bound; n];
    loop {
        if u.iter().any(|&v| v != 0) {
            let ui: IntVector = u.iter().map(|&v| Int::from(v)).collect();
            if iqp.a.row_iter().all(|row| !dot(row, &ui).is_positive()) {
                let curvature = dot(&ui, &iqp.q.mul_vec(&ui)?);
                let slope = dot(x, &symmetric.mul_vec(&ui)?) + dot(linear, &ui);
                if curvature.is_negative() || (curvature.is_zero() && slope.is_negative()) {
                    return Ok(Some(RayCertificate { x: x.to_vec(), u: ui }));
                }
            }
        }
        let Some(k) = (0..n).rev().find(|&k| u[k] < bound) else {
            return Ok(None);
        };
        u[k] += 1;
        for v in &mut u[k + 1..] {
            *v = -bound;
        }
    }
}

/// [`ray_certificate_from`] at the point the solver returns, if any.
pub fn ray_certificate(iqp: &Iqp, bound: i64) -> Result<Option<RayCertificate>> {
    match solver::solve(iqp, &SolverConfig::default())?.outcome.point() {
        Some(x) => ray_certificate_from(iqp, x, bound),
        None => Ok(None),
    }
}

/// Settings for [`decide`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DecideConfig {
    pub solver: SolverConfig,
    pub unbounded: UnboundedConfig,
    /// `|u|∞` range of the ray search; the default is used when `None`.
    pub ray_bound: Option<i64>,
}

/// Full classification: infeasible, unbounded, or optimal.
///
/// Runs the solver for feasibility, then the ray search, then the exhaustive
/// line check. When the line check runs out of budget the solver's point is
/// returned as [`SolveOutcome::FeasibleOnly`].
pub fn decide(iqp: &Iqp, config: &DecideConfig) -> Result<SolveReport> {
    let report = solver::solve(iqp, &config.solver)?;
    let SolveOutcome::Optimal { x, value } = report.outcome else {
        return Ok(report);
    };
    let stats: SearchStats = report.stats;
    let bound = config.ray_bound.unwrap_or(DEFAULT_RAY_BOUND);
    if ray_certificate_from(iqp, &x, bound)?.is_some() {
        return Ok(SolveReport { outcome: SolveOutcome::Unbounded, stats });
    }
    let outcome = match check_unbounded(iqp, &config.unbounded)? {
        Verdict::Unbounded(_) => SolveOutcome::Unbounded,
        Verdict::Bounded => SolveOutcome::Optimal { x, value },
        Verdict::Unknown => SolveOutcome::FeasibleOnly { x, value },
    };
    Ok(SolveReport { outcome, stats })
}
