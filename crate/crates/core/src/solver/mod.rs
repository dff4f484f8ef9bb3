//! Branching search over affine subspaces.
//!
//! Every node is an affine subspace `{x : Cx = d}` of the normalized problem.
//! A node either has full column rank, in which case its single point is the
//! only candidate, or it branches by appending one equation that is
//! independent of `C`:
//!
//! * a constraint row `a_j` pinned to a value near its bound, covering
//!   optimal points that cannot move one kernel step in some direction;
//! * a row `2yᵀQ` for a kernel column `y`, pinned to a value the gradient can
//!   take at an optimal point that can move in every direction.
//!
//! When neither applies, every optimum can be translated along the kernel
//! lattice for free, so a search of the neighbourhood of an anchor point of
//! the node finds one. The best candidate over the whole tree, ordered by
//! objective and then lexicographically, is the answer.
//!
//! Two policies share this skeleton. [`Policy::Exhaustive`] uses the
//! worst-case value windows, an ℓ1 neighbourhood and no pruning at all. It
//! is only practical for one or two variables. [`Policy::Pruned`] uses the
//! tight windows the argument actually needs, discards nodes whose region
//! has no real point, splits the shallow case into disjoint children, and
//! never visits the same subspace twice.

mod branching;

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

pub use branching::{
    base_case_solve, coset_representatives, enumerate_deep_branches, enumerate_shallow_branches, local_search,
    SearchNode,
};

use crate::error::{Error, Result};
use crate::linalg::{
    dot, integer_kernel_basis, is_feasible, kernel_from_elimination,
    rat_mul_vec, rank, right_inverse, to_rational, CanonicalSystem, Matrix,
};
use crate::model::{check_feasible, evaluate_objective, normalize, split_equalities, AugmentedIqp, Iqp, SolveOutcome};
use crate::scalar::gcd_slice;
use crate::{Int, IntMatrix, IntVector, Rat};
pub(crate) use branching::doubled_form_row;

/// Default cap on visited search nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
/// Default cap on points examined by neighbourhood searches, summed over
/// all nodes.
pub const DEFAULT_LOCAL_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Policy {
    /// Worst-case windows, local search at every node, no pruning.
    Exhaustive,
    /// Tight windows, real-relaxation pruning, disjoint shallow children and
    /// a visited-subspace set.
    #[default]
    Pruned,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub policy: Policy,
    pub node_budget: u64,
    pub local_budget: u64,
    /// Worker threads; one means the search runs on the calling thread.
    pub workers: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            policy: Policy::Pruned,
            node_budget: DEFAULT_NODE_BUDGET,
            local_budget: DEFAULT_LOCAL_BUDGET,
            workers: 1,
        }
    }
}

impl SolverConfig {
    pub fn with_policy(mut self, policy: Policy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_node_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }
}

/// Counters collected during a search.
///
/// `max_delta` is the largest subdeterminant bound seen under
/// [`Policy::Exhaustive`]; the pruned policy never computes that bound and
/// records the largest basis determinant of an equation system instead.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub max_delta: Int,
    pub local_points: u64,
    pub max_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: SolveOutcome,
    pub stats: SearchStats,
}

/// Best point of a normalized problem: objective in the doubled scale and
/// the full normalized vector.
pub type Candidate = (Int, IntVector);

fn better(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y < x { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Solve an IQP. Returns an optimal point when the problem is feasible and
/// bounded, some feasible point when it is feasible, and
/// [`SolveOutcome::Infeasible`] otherwise. Never reports unboundedness; see
/// [`crate::unbounded`] for that.
pub fn solve(iqp: &Iqp, config: &SolverConfig) -> Result<SolveReport> {
    let normalized = normalize(iqp)?;
    let (best, stats) = search(&normalized.problem, config)?;
    let outcome = match best {
        None => SolveOutcome::Infeasible,
        Some((value, x)) => {
            SolveOutcome::Optimal { x: normalized.restrict(&x), value: normalized.original_value(&value) }
        }
    };
    Ok(SolveReport { outcome, stats })
}

/// Search a normalized problem (symmetric `Q`, independent `C`).
pub fn search(problem: &AugmentedIqp, config: &SolverConfig) -> Result<(Option<Candidate>, SearchStats)> {
    let run = || Searcher::new(problem, config).run();
    if config.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|_| Error::ResourceExhausted { what: "worker threads", limit: config.workers as u64 })?;
        pool.install(run)
    } else {
        run()
    }
}

type Best = Result<Option<Candidate>>;

struct Searcher<'a> {
    problem: &'a AugmentedIqp,
    config: &'a SolverConfig,
    n: usize,
    alpha: Int,
    /// Inequalities the search branches on; for the pruned policy the paired
    /// rows have moved into the root equations.
    a: IntMatrix,
    b: IntVector,
    root_rows: usize,
    nodes: AtomicU64,
    leaves: AtomicU64,
    local_points: AtomicU64,
    max_depth: AtomicUsize,
    max_delta: Mutex<Int>,
    visited: Mutex<HashSet<(CanonicalSystem<Int>, IntVector)>>,
}

impl<'a> Searcher<'a> {
    fn new(problem: &'a AugmentedIqp, config: &'a SolverConfig) -> Self {
        Searcher {
            problem,
            config,
            n: problem.n(),
            alpha: problem.base.alpha(),
            a: problem.base.a.clone(),
            b: problem.base.b.clone(),
            root_rows: problem.c.rows(),
            nodes: AtomicU64::new(0),
            leaves: AtomicU64::new(0),
            local_points: AtomicU64::new(0),
            max_depth: AtomicUsize::new(0),
            max_delta: Mutex::new(Int::zero()),
            visited: Mutex::new(HashSet::new()),
        }
    }

    fn run(mut self) -> Result<(Option<Candidate>, SearchStats)> {
        let best = match self.config.policy {
            Policy::Exhaustive => {
                let root = SearchNode::root(self.problem.c.clone(), self.problem.d.clone());
                self.exhaustive(root)?
            }
            Policy::Pruned => {
                let (a, b, equations) = split_equalities(&self.problem.base.a, &self.problem.base.b);
                let mut c = self.problem.c.clone();
                let mut d = self.problem.d.clone();
                for (row, v) in equations {
                    c.push_row(&row)?;
                    d.push(v);
                }
                self.a = a;
                self.b = b;
                match CanonicalSystem::new(&c, &d)? {
                    None => None,
                    Some(sys) => {
                        self.root_rows = sys.rank();
                        let bounds = self.b.clone();
                        self.visited.lock().expect("visited set").insert((sys.clone(), bounds.clone()));
                        self.pruned(sys, 0, bounds)?
                    }
                }
            }
        };
        let stats = SearchStats {
            nodes: self.nodes.load(Ordering::Relaxed),
            leaves: self.leaves.load(Ordering::Relaxed),
            max_delta: self.max_delta.lock().expect("stats").clone(),
            local_points: self.local_points.load(Ordering::Relaxed),
            max_depth: self.max_depth.load(Ordering::Relaxed),
        };
        Ok((best, stats))
    }

    fn enter(&self, node: &SearchNode) -> Result<()> {
        self.enter_level(node.depth, node.c.rows())
    }

    fn enter_level(&self, depth: usize, equations: usize) -> Result<()> {
        let count = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if count > self.config.node_budget {
            return Err(Error::ResourceExhausted { what: "search nodes", limit: self.config.node_budget });
        }
        assert!(depth <= self.n, "recursion deeper than the number of variables");
        assert_eq!(equations, self.root_rows + depth, "one equation per level");
        self.max_depth.fetch_max(depth, Ordering::Relaxed);
        Ok(())
    }

    fn note_delta(&self, delta: &Int) {
        let mut m = self.max_delta.lock().expect("stats");
        if *delta > *m {
            *m = delta.clone();
        }
    }

    fn take_local(&self, count: u64) -> Result<()> {
        let used = self.local_points.fetch_add(count, Ordering::Relaxed) + count;
        if used > self.config.local_budget {
            return Err(Error::ResourceExhausted { what: "local search points", limit: self.config.local_budget });
        }
        Ok(())
    }

    fn local_remaining(&self) -> u64 {
        self.config.local_budget.saturating_sub(self.local_points.load(Ordering::Relaxed))
    }

    fn candidate(&self, x: IntVector) -> Result<Option<Candidate>> {
        let p = self.problem;
        if !check_feasible(&p.base.a, &p.base.b, &p.c, &p.d, &x)? {
            return Ok(None);
        }
        Ok(Some((evaluate_objective(&p.base.q, &x)?, x)))
    }

    fn best_of(&self, points: Vec<IntVector>) -> Best {
        let mut best = None;
        for x in points {
            best = better(best, self.candidate(x)?);
        }
        Ok(best)
    }

    /// Canonical anchor `C⁺d` of the node, zero when there are no equations.
    fn anchor(&self, node: &SearchNode) -> Result<Vec<Rat>> {
        if node.c.rows() == 0 {
            return Ok(vec![Rat::zero(); self.n]);
        }
        Ok(rat_mul_vec(&right_inverse(&node.c)?, &to_rational(&node.d)))
    }

    fn fan_out<T: Send>(&self, children: Vec<T>, f: impl Fn(T) -> Best + Sync + Send) -> Best {
        if self.config.workers > 1 {
            children.into_par_iter().map(f).try_reduce(|| None, |x, y| Ok(better(x, y)))
        } else {
            let mut best = None;
            for c in children {
                best = better(best, f(c)?);
            }
            Ok(best)
        }
    }

    fn exhaustive(&self, node: SearchNode) -> Best {
        self.enter(&node)?;
        assert_eq!(rank(&node.c), node.c.rows(), "equations stay independent");
        if node.c.rows() == self.n {
            self.leaves.fetch_add(1, Ordering::Relaxed);
            let x = base_case_solve(&node, &self.a, &self.b)?;
            return self.best_of(x.into_iter().collect());
        }
        let kb = integer_kernel_basis(&node.c)?;
        self.note_delta(&kb.delta);
        let x0 = self.anchor(&node)?;
        let y_l1: Int = kb.y.entries().iter().map(|v| v.abs()).sum();
        let literal = &kb.delta * &kb.delta * Int::from(self.n);
        let radius = literal.max(y_l1.div_ceil(&Int::from(2)));
        let (points, visited) = local_search(&node, &self.a, &self.b, &x0, &radius, self.local_remaining())?;
        self.take_local(visited)?;
        let mut best = self.best_of(points)?;
        let mut branches = enumerate_shallow_branches(&node, &self.a, &self.b, &self.alpha, &kb.delta);
        branches.extend(enumerate_deep_branches(&node, &self.problem.base.q, &kb.y, &self.alpha, &kb.delta));
        let pending = self.nodes.load(Ordering::Relaxed) + branches.len() as u64;
        if pending > self.config.node_budget {
            return Err(Error::ResourceExhausted { what: "search nodes", limit: self.config.node_budget });
        }
        if branches.is_empty() {
            self.leaves.fetch_add(1, Ordering::Relaxed);
        }
        let children = branches
            .into_iter()
            .map(|(row, v)| node.child(&row, v))
            .collect::<Result<Vec<_>>>()?;
        best = better(best, self.fan_out(children, |c| self.exhaustive(c))?);
        Ok(best)
    }

    fn pruned(&self, sys: CanonicalSystem<Int>, depth: usize, bounds: IntVector) -> Best {
        self.enter_level(depth, sys.rank())?;
        let n = self.n;
        let e = sys.to_elimination();
        self.note_delta(&e.scale);
        if sys.rank() == n {
            self.leaves.fetch_add(1, Ordering::Relaxed);
            let x = sys.particular_point();
            if x.iter().any(|v| !v.is_integer()) {
                return Ok(None);
            }
            return self.candidate(x.into_iter().map(|v| v.to_integer()).collect());
        }
        let kernel = kernel_from_elimination(&e, n);
        let x0 = sys.particular_point();

        // Each inequality restricted to the node, as a function of kernel
        // coordinates: a_j (x0 + Y t) ≤ bound_j.
        let proj: Vec<IntVector> =
            self.a.row_iter().map(|row| kernel.iter().map(|y| dot(row, y)).collect()).collect();
        let reach: IntVector =
            proj.iter().map(|p| p.iter().map(|v| v.abs()).max().unwrap_or_else(Int::zero)).collect();
        let lhs = Matrix::from_rows(kernel.len(), proj.clone())?;
        // The anchor is X / scale with X integral; scaling the kernel
        // coordinates by `scale` keeps the relaxation integral.
        let numerators: IntVector = {
            let mut v = vec![Int::zero(); n];
            for (i, &p) in e.pivots.iter().enumerate() {
                v[p] = e.reduced.get(i, n).clone();
            }
            v
        };
        let slack: IntVector =
            self.a.row_iter().zip(&bounds).map(|(row, bj)| bj * &e.scale - dot(row, &numerators)).collect();
        if !is_feasible(&lhs, &slack) {
            self.leaves.fetch_add(1, Ordering::Relaxed);
            return Ok(None);
        }
        let deep_slack: IntVector = slack.iter().zip(&reach).map(|(s, w)| s - w * &e.scale).collect();
        let deep_possible = is_feasible(&lhs, &deep_slack);

        let mut branches: Vec<(IntVector, Int, IntVector)> = Vec::new();
        // Shallow: the first row a point is close to decides its child, so
        // earlier rows are kept at least one kernel step away from their bound.
        let mut excluded = bounds.clone();
        for (j, row) in self.a.row_iter().enumerate() {
            if proj[j].iter().all(|v| v.is_zero()) {
                continue;
            }
            let g = gcd_slice(row);
            let primitive: IntVector = row.iter().map(|v| v / &g).collect();
            let lo: Int = &bounds[j] - &reach[j] + 1;
            let lo = lo.div_ceil(&g);
            let hi = bounds[j].div_floor(&g);
            let mut k = lo;
            while k <= hi {
                branches.push((primitive.clone(), k.clone(), excluded.clone()));
                k += 1;
            }
            excluded[j] = &bounds[j] - &reach[j];
        }
        let mut best = None;
        if deep_possible {
            // Deep: every move stays feasible, so each bound has slack.
            let deep_bounds: IntVector = bounds.iter().zip(&reach).map(|(b, w)| b - w).collect();
            for y in &kernel {
                let row = doubled_form_row(&self.problem.base.q, y);
                if kernel.iter().all(|k| dot(&row, k).is_zero()) {
                    continue;
                }
                let curvature: Int = dot(&row, y) / 2;
                if curvature.is_negative() {
                    continue;
                }
                let g = gcd_slice(&row);
                let primitive: IntVector = row.iter().map(|v| v / &g).collect();
                let lo = (-curvature.clone()).div_ceil(&g);
                let hi = curvature.div_floor(&g);
                let mut k = lo;
                while k <= hi {
                    branches.push((primitive.clone(), k.clone(), deep_bounds.clone()));
                    k += 1;
                }
            }
            let points = coset_representatives(&e, &kernel, n, &x0, self.local_remaining())?;
            self.take_local(points.len() as u64)?;
            best = self.best_of(points)?;
        }

        let mut children = Vec::new();
        for (row, v, child_bounds) in branches {
            let Some(child) = sys.with_equation(&row, v) else {
                continue;
            };
            let key = (child, child_bounds);
            if !self.visited.lock().expect("visited set").insert(key.clone()) {
                continue;
            }
            children.push(key);
        }
        if children.is_empty() {
            self.leaves.fetch_add(1, Ordering::Relaxed);
        }
        best = better(best, self.fan_out(children, |(c, b)| self.pruned(c, depth + 1, b))?);
        Ok(best)
    }
}
