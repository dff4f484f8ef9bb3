//! Problem representation and the normalizing transforms applied before search.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{dot, has_full_row_rank, Matrix};
use crate::{Int, IntMatrix, IntVector, Rat};

/// `min xᵀQx + qᵀx + c` subject to `Ax ≤ b` over integer `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iqp {
    pub q: IntMatrix,
    pub a: IntMatrix,
    pub b: IntVector,
    pub linear: Option<IntVector>,
    pub constant: Option<Int>,
}

impl Iqp {
    pub fn new(q: IntMatrix, a: IntMatrix, b: IntVector) -> Result<Self> {
        let iqp = Iqp { q, a, b, linear: None, constant: None };
        iqp.validate()?;
        Ok(iqp)
    }

    pub fn with_linear(mut self, q: IntVector) -> Result<Self> {
        self.linear = Some(q);
        self.validate()?;
        Ok(self)
    }

    pub fn with_constant(mut self, c: Int) -> Self {
        self.constant = Some(c);
        self
    }

    pub fn n(&self) -> usize {
        self.q.cols()
    }

    fn validate(&self) -> Result<()> {
        let n = self.q.cols();
        if !self.q.is_square() {
            return Err(Error::NotSquare { rows: self.q.rows(), cols: self.q.cols() });
        }
        if self.a.cols() != n {
            return Err(Error::DimensionMismatch(format!("A has {} columns, Q has {n}", self.a.cols())));
        }
        if self.b.len() != self.a.rows() {
            return Err(Error::DimensionMismatch(format!("b has {} entries, A has {} rows", self.b.len(), self.a.rows())));
        }
        if let Some(l) = &self.linear {
            if l.len() != n {
                return Err(Error::DimensionMismatch(format!("linear term has {} entries, expected {n}", l.len())));
            }
        }
        Ok(())
    }

    /// Largest absolute entry of `Q` and `A`.
    pub fn alpha(&self) -> Int {
        self.q.max_abs_entry().max(self.a.max_abs_entry())
    }

    /// Full objective including the linear and constant parts.
    pub fn objective(&self, x: &[Int]) -> Result<Int> {
        let mut v = evaluate_objective(&self.q, x)?;
        if let Some(l) = &self.linear {
            v += dot(l, x);
        }
        if let Some(c) = &self.constant {
            v += c;
        }
        Ok(v)
    }

    pub fn is_feasible(&self, x: &[Int]) -> Result<bool> {
        check_feasible(&self.a, &self.b, &Matrix::empty(self.n()), &[], x)
    }

    fn has_affine_part(&self) -> bool {
        self.linear.as_ref().is_some_and(|l| l.iter().any(|v| !v.is_zero()))
            || self.constant.as_ref().is_some_and(|c| !c.is_zero())
    }
}

/// An [`Iqp`] with an additional system of independent equations `Cx = d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedIqp {
    pub base: Iqp,
    pub c: IntMatrix,
    pub d: IntVector,
}

impl AugmentedIqp {
    pub fn new(base: Iqp, c: IntMatrix, d: IntVector) -> Result<Self> {
        if c.cols() != base.n() || c.rows() != d.len() {
            return Err(Error::DimensionMismatch(format!(
                "equality system is {}x{} with {} right-hand sides over {} variables",
                c.rows(),
                c.cols(),
                d.len(),
                base.n()
            )));
        }
        if !has_full_row_rank(&c) {
            return Err(Error::DependentRows);
        }
        Ok(AugmentedIqp { base, c, d })
    }

    pub fn unconstrained(base: Iqp) -> Self {
        let n = base.n();
        AugmentedIqp { base, c: Matrix::empty(n), d: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn is_feasible(&self, x: &[Int]) -> Result<bool> {
        check_feasible(&self.base.a, &self.base.b, &self.c, &self.d, x)
    }
}

/// What a solve concluded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: IntVector, value: Rat },
    /// A feasible point whose optimality is not established, either because
    /// the problem is unbounded or because the unboundedness test gave up.
    FeasibleOnly { x: IntVector, value: Rat },
}

impl SolveOutcome {
    pub fn point(&self) -> Option<&IntVector> {
        match self {
            SolveOutcome::Optimal { x, .. } | SolveOutcome::FeasibleOnly { x, .. } => Some(x),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&Rat> {
        match self {
            SolveOutcome::Optimal { value, .. } | SolveOutcome::FeasibleOnly { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// `Q + Qᵀ`, which doubles every objective value.
pub fn symmetrize(q: &IntMatrix) -> Result<IntMatrix> {
    if !q.is_square() {
        return Err(Error::NotSquare { rows: q.rows(), cols: q.cols() });
    }
    let n = q.rows();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, q.get(i, j) + q.get(j, i));
        }
    }
    Ok(out)
}

/// Fold a linear term and constant into a quadratic form over one extra
/// variable that is pinned to one. Returns the enlarged matrix and the
/// equality row fixing the new variable.
pub fn embed_linear(q: &IntMatrix, linear: &[Int], constant: &Int) -> Result<(IntMatrix, IntVector)> {
    let n = q.rows();
    if linear.len() != n {
        return Err(Error::DimensionMismatch(format!("linear term has {} entries, expected {n}", linear.len())));
    }
    let mut out = Matrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, q.get(i, j).clone());
        }
        out.set(n, i, linear[i].clone());
    }
    out.set(n, n, constant.clone());
    let mut row = vec![Int::zero(); n + 1];
    row[n] = Int::one();
    Ok((out, row))
}

/// Drop duplicate constraint rows, keeping the smallest right-hand side.
/// Surviving rows keep the order of their first occurrence.
pub fn reduce_rows(a: &IntMatrix, b: &[Int]) -> (IntMatrix, IntVector) {
    let mut index: HashMap<&[Int], usize> = HashMap::new();
    let mut rows: Vec<&[Int]> = Vec::new();
    let mut rhs: Vec<Int> = Vec::new();
    for (row, v) in a.row_iter().zip(b) {
        match index.get(row) {
            Some(&k) => {
                if *v < rhs[k] {
                    rhs[k] = v.clone();
                }
            }
            None => {
                index.insert(row, rows.len());
                rows.push(row);
                rhs.push(v.clone());
            }
        }
    }
    let m = Matrix::from_rows(a.cols(), rows.into_iter().map(|r| r.to_vec()).collect()).expect("same width");
    (m, rhs)
}

/// `xᵀQx`.
pub fn evaluate_objective(q: &IntMatrix, x: &[Int]) -> Result<Int> {
    let qx = q.mul_vec(x)?;
    if qx.len() != x.len() {
        return Err(Error::NotSquare { rows: q.rows(), cols: q.cols() });
    }
    Ok(dot(x, &qx))
}

/// `Ax ≤ b` and `Cx = d`.
pub fn check_feasible(a: &IntMatrix, b: &[Int], c: &IntMatrix, d: &[Int], x: &[Int]) -> Result<bool> {
    if b.len() != a.rows() || d.len() != c.rows() {
        return Err(Error::DimensionMismatch("right-hand side length".into()));
    }
    let ax = a.mul_vec(x)?;
    let cx = c.mul_vec(x)?;
    Ok(ax.iter().zip(b).all(|(l, r)| l <= r) && cx.iter().zip(d).all(|(l, r)| l == r))
}

/// Whether a feasible point can move one kernel step in every direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Deep,
    /// Index of the first kernel column whose step leaves the feasible set.
    Shallow(usize),
}

/// Classify a feasible point against the kernel columns in `y`.
pub fn classify_solution(
    x: &[Int],
    a: &IntMatrix,
    b: &[Int],
    c: &IntMatrix,
    d: &[Int],
    y: &IntMatrix,
) -> Result<Classification> {
    if !check_feasible(a, b, c, d, x)? {
        return Err(Error::InfeasiblePoint);
    }
    if y.rows() != x.len() {
        return Err(Error::DimensionMismatch(format!("kernel vectors have length {}, point has {}", y.rows(), x.len())));
    }
    for i in 0..y.cols() {
        let col = y.column(i);
        let plus: Vec<Int> = x.iter().zip(&col).map(|(u, v)| u + v).collect();
        let minus: Vec<Int> = x.iter().zip(&col).map(|(u, v)| u - v).collect();
        if !check_feasible(a, b, c, d, &plus)? || !check_feasible(a, b, c, d, &minus)? {
            return Ok(Classification::Shallow(i));
        }
    }
    Ok(Classification::Deep)
}

/// A problem after embedding, symmetrization and row reduction.
///
/// The objective of `problem` at a lifted point is twice the original
/// objective, and when an affine part was embedded the last variable is
/// pinned to one by the single row of `problem.c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub problem: AugmentedIqp,
    pub original_vars: usize,
    pub embedded: bool,
}

impl Normalized {
    /// Original-variable view of a point of the normalized problem.
    pub fn restrict(&self, x: &[Int]) -> IntVector {
        x[..self.original_vars].to_vec()
    }

    /// Normalized-problem view of an original point.
    pub fn lift(&self, x: &[Int]) -> IntVector {
        let mut out = x.to_vec();
        if self.embedded {
            out.push(Int::one());
        }
        out
    }

    /// Original-scale value of a normalized objective value.
    pub fn original_value(&self, doubled: &Int) -> Rat {
        Rat::new(doubled.clone(), Int::from(2))
    }
}

/// Embed any affine objective part, symmetrize, and drop duplicate rows.
pub fn normalize(iqp: &Iqp) -> Result<Normalized> {
    iqp.validate()?;
    let n = iqp.n();
    let (q, a, c, d, embedded) = if iqp.has_affine_part() {
        let zero = vec![Int::zero(); n];
        let linear = iqp.linear.as_deref().unwrap_or(&zero);
        let constant = iqp.constant.clone().unwrap_or_default();
        let (q, row) = embed_linear(&iqp.q, linear, &constant)?;
        let a_rows = iqp
            .a
            .row_iter()
            .map(|r| {
                let mut r = r.to_vec();
                r.push(Int::zero());
                r
            })
            .collect();
        let a = Matrix::from_rows(n + 1, a_rows)?;
        (q, a, Matrix::from_rows(n + 1, vec![row])?, vec![Int::one()], true)
    } else {
        (iqp.q.clone(), iqp.a.clone(), Matrix::empty(n), Vec::new(), false)
    };
    let q = symmetrize(&q)?;
    let (a, b) = reduce_rows(&a, &iqp.b);
    let base = Iqp::new(q, a, b)?;
    Ok(Normalized { problem: AugmentedIqp::new(base, c, d)?, original_vars: n, embedded })
}

/// Split off pairs of rows `r x ≤ v` and `-r x ≤ -v` as equations `r x = v`.
///
/// Returns the remaining inequalities and the equations. Each equation is
/// oriented so its first nonzero coefficient is positive.
pub fn split_equalities(a: &IntMatrix, b: &[Int]) -> (IntMatrix, IntVector, Vec<(IntVector, Int)>) {
    let rows: Vec<&[Int]> = a.row_iter().collect();
    let mut index: HashMap<&[Int], usize> = HashMap::new();
    for (i, r) in rows.iter().enumerate() {
        index.entry(*r).or_insert(i);
    }
    let mut used = vec![false; rows.len()];
    let mut equations = Vec::new();
    for i in 0..rows.len() {
        if used[i] || rows[i].iter().all(|v| v.is_zero()) {
            continue;
        }
        let neg: Vec<Int> = rows[i].iter().map(|v| -v).collect();
        if let Some(&j) = index.get(neg.as_slice()) {
            if !used[j] && j != i && b[i] == -b[j].clone() {
                used[i] = true;
                used[j] = true;
                let first_positive = rows[i].iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_positive());
                if first_positive {
                    equations.push((rows[i].to_vec(), b[i].clone()));
                } else {
                    equations.push((neg, b[j].clone()));
                }
            }
        }
    }
    let keep: Vec<usize> = (0..rows.len()).filter(|&i| !used[i]).collect();
    let rest = a.submatrix(&keep, &(0..a.cols()).collect::<Vec<_>>());
    let rhs = keep.iter().map(|&i| b[i].clone()).collect();
    (rest, rhs, equations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, int_matrix, int_vec};
    use proptest::prelude::*;

    #[test]
    fn symmetrize_examples() {
        assert_eq!(symmetrize(&int_matrix(2, &[&[0, 2], &[0, 0]])).unwrap(), int_matrix(2, &[&[0, 2], &[2, 0]]));
        assert_eq!(symmetrize(&int_matrix(1, &[&[1]])).unwrap(), int_matrix(1, &[&[2]]));
        let s = int_matrix(2, &[&[1, -1], &[-1, 3]]);
        assert_eq!(symmetrize(&s).unwrap(), int_matrix(2, &[&[2, -2], &[-2, 6]]));
    }

    #[test]
    fn embed_examples() {
        let (q, row) = embed_linear(&int_matrix(1, &[&[1]]), &int_vec(&[-4]), &int(0)).unwrap();
        assert_eq!(q, int_matrix(2, &[&[1, 0], &[-4, 0]]));
        assert_eq!(row, int_vec(&[0, 1]));
        for x in -5..=5 {
            assert_eq!(evaluate_objective(&q, &int_vec(&[x, 1])).unwrap(), int(x * x - 4 * x));
        }
        let (q, _) = embed_linear(&int_matrix(2, &[&[0, 0], &[0, 0]]), &int_vec(&[1, 1]), &int(5)).unwrap();
        assert_eq!(evaluate_objective(&q, &int_vec(&[2, 3, 1])).unwrap(), int(10));
    }

    #[test]
    fn reduce_rows_examples() {
        let (a, b) = reduce_rows(&int_matrix(1, &[&[1], &[1], &[-1]]), &int_vec(&[5, 3, 0]));
        assert_eq!(a, int_matrix(1, &[&[1], &[-1]]));
        assert_eq!(b, int_vec(&[3, 0]));
        let (a, _) = reduce_rows(&int_matrix(2, &[&[1, 0], &[1, 0]]), &int_vec(&[2, 2]));
        assert_eq!(a.rows(), 1);
        let orig = int_matrix(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(reduce_rows(&orig, &int_vec(&[1, 2])).0, orig);
    }

    #[test]
    fn objective_and_feasibility_examples() {
        let q = int_matrix(2, &[&[0, 1], &[1, 0]]);
        assert_eq!(evaluate_objective(&q, &int_vec(&[5, -5])).unwrap(), int(-50));
        assert_eq!(evaluate_objective(&q, &int_vec(&[0, 0])).unwrap(), int(0));
        let a = int_matrix(1, &[&[1]]);
        let e = Matrix::empty(1);
        assert!(check_feasible(&a, &int_vec(&[3]), &e, &[], &int_vec(&[3])).unwrap());
        assert!(!check_feasible(&a, &int_vec(&[3]), &e, &[], &int_vec(&[4])).unwrap());
    }

    #[test]
    fn classification_examples() {
        let y = int_matrix(1, &[&[1]]);
        let e = Matrix::empty(1);
        let none = Matrix::empty(1);
        assert_eq!(classify_solution(&int_vec(&[7]), &none, &[], &e, &[], &y).unwrap(), Classification::Deep);
        let a = int_matrix(1, &[&[1]]);
        assert_eq!(
            classify_solution(&int_vec(&[3]), &a, &int_vec(&[3]), &e, &[], &y).unwrap(),
            Classification::Shallow(0)
        );
        let a2 = int_matrix(1, &[&[1], &[-1]]);
        assert_eq!(classify_solution(&int_vec(&[0]), &a2, &int_vec(&[5, 5]), &e, &[], &y).unwrap(), Classification::Deep);
        assert_eq!(
            classify_solution(&int_vec(&[9]), &a, &int_vec(&[3]), &e, &[], &y),
            Err(Error::InfeasiblePoint)
        );
    }

    #[test]
    fn normalize_tracks_embedding() {
        let iqp = Iqp::new(int_matrix(1, &[&[1]]), int_matrix(1, &[&[1], &[1]]), int_vec(&[4, 2]))
            .unwrap()
            .with_linear(int_vec(&[-4]))
            .unwrap();
        let nz = normalize(&iqp).unwrap();
        assert!(nz.embedded);
        assert_eq!(nz.problem.n(), 2);
        assert_eq!(nz.problem.base.a.rows(), 1);
        assert_eq!(nz.problem.c, int_matrix(2, &[&[0, 1]]));
        let x = int_vec(&[3]);
        let doubled = evaluate_objective(&nz.problem.base.q, &nz.lift(&x)).unwrap();
        assert_eq!(nz.original_value(&doubled), Rat::from_integer(iqp.objective(&x).unwrap()));
    }

    #[test]
    fn split_equalities_pairs_rows() {
        let a = int_matrix(2, &[&[1, 1], &[0, 1], &[-1, -1], &[0, -1]]);
        let (rest, rhs, eqs) = split_equalities(&a, &int_vec(&[3, 4, -3, 0]));
        assert_eq!(eqs, vec![(int_vec(&[1, 1]), int(3))]);
        assert_eq!(rest, int_matrix(2, &[&[0, 1], &[0, -1]]));
        assert_eq!(rhs, int_vec(&[4, 0]));
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = IntMatrix> {
        proptest::collection::vec(-3i64..=3, n * n)
            .prop_map(move |v| Matrix::new(n, n, v.into_iter().map(int).collect()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn symmetrize_doubles_objective(q in small_matrix(3), x in proptest::collection::vec(-6i64..=6, 3)) {
            let x = int_vec(&x);
            let s = symmetrize(&q).unwrap();
            prop_assert_eq!(evaluate_objective(&s, &x).unwrap(), evaluate_objective(&q, &x).unwrap() * 2);
        }

        #[test]
        fn embedding_reproduces_affine_objective(
            q in small_matrix(2),
            lin in proptest::collection::vec(-5i64..=5, 2),
            c in -9i64..=9,
            x in proptest::collection::vec(-6i64..=6, 2),
        ) {
            let lin = int_vec(&lin);
            let x = int_vec(&x);
            let (qq, _) = embed_linear(&q, &lin, &int(c)).unwrap();
            let mut lifted = x.clone();
            lifted.push(int(1));
            let expect = evaluate_objective(&q, &x).unwrap() + dot(&lin, &x) + int(c);
            prop_assert_eq!(evaluate_objective(&qq, &lifted).unwrap(), expect);
        }
    }
}
