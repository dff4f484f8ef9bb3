//! Fraction-free Gauss-Jordan elimination and everything built on it.

use num_rational::Ratio;
use num_traits::{One, Zero};

use super::det::max_abs_subdeterminant;
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{gcd_slice, IntScalar};

/// Result of fraction-free Gauss-Jordan elimination.
///
/// Every pivot entry equals `scale`, and pivot columns are zero outside their
/// pivot row. All entries stay integral because each one is (up to sign) a
/// minor of the input, which is the Bareiss property carried over to the
/// reduced form.
#[derive(Clone, Debug)]
pub struct Elimination<T> {
    pub reduced: Matrix<T>,
    pub pivots: Vec<usize>,
    pub scale: T,
    pub odd_permutation: bool,
}

impl<T: IntScalar> Elimination<T> {
    /// Eliminate, choosing pivots only among the first `pivot_cols` columns.
    /// Columns past that limit are carried along, which is how augmented
    /// systems `[C | d]` are reduced.
    pub fn run(m: &Matrix<T>, pivot_cols: usize) -> Self {
        let rows = m.rows();
        let cols = m.cols();
        let mut a: Vec<Vec<T>> = m.to_rows();
        let mut pivots = Vec::new();
        let mut prev = T::one();
        let mut odd = false;
        let mut r = 0;
        for c in 0..pivot_cols.min(cols) {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            if p != r {
                a.swap(p, r);
                odd = !odd;
            }
            let pivot_row = a[r].clone();
            let pv = pivot_row[c].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i == r {
                    continue;
                }
                let factor = row[c].clone();
                for j in 0..cols {
                    let v = pv.clone() * &row[j] - factor.clone() * &pivot_row[j];
                    row[j] = v / &prev;
                }
            }
            prev = pv;
            pivots.push(c);
            r += 1;
        }
        let reduced = Matrix::from_rows(cols, a).expect("rows keep their width");
        Elimination { reduced, pivots, scale: prev, odd_permutation: odd }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Rows past the rank whose carried (non-pivot-eligible) part is nonzero.
    /// For an augmented system this flags inconsistency.
    pub fn has_inconsistent_row(&self, pivot_cols: usize) -> bool {
        (self.rank()..self.reduced.rows())
            .any(|i| self.reduced.row(i)[pivot_cols..].iter().any(|v| !v.is_zero()))
    }
}

/// Exact rank over the rationals.
pub fn rank<T: IntScalar>(m: &Matrix<T>) -> usize {
    Elimination::run(m, m.cols()).rank()
}

/// `true` iff `row` is not in the row space of `m`.
pub fn is_independent_row<T: IntScalar>(m: &Matrix<T>, row: &[T]) -> bool {
    let extended = m.with_row(row).expect("row length matches");
    rank(&extended) > rank(m)
}

/// `[C | d]` as one matrix.
pub fn augmented<T: IntScalar>(c: &Matrix<T>, d: &[T]) -> Result<Matrix<T>> {
    if d.len() != c.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} right-hand sides for {} equations",
            d.len(),
            c.rows()
        )));
    }
    let rows = c
        .row_iter()
        .zip(d)
        .map(|(r, v)| {
            let mut row = r.to_vec();
            row.push(v.clone());
            row
        })
        .collect();
    Matrix::from_rows(c.cols() + 1, rows)
}

/// Unique rational solution of a square system, `None` when singular.
pub fn solve_unique_exact<T: IntScalar>(c: &Matrix<T>, d: &[T]) -> Result<Option<Vec<Ratio<T>>>> {
    if !c.is_square() {
        return Err(Error::NotSquare { rows: c.rows(), cols: c.cols() });
    }
    let n = c.cols();
    let e = Elimination::run(&augmented(c, d)?, n);
    if e.rank() < n {
        return Ok(None);
    }
    let mut x = vec![Ratio::zero(); n];
    for (i, &p) in e.pivots.iter().enumerate() {
        x[p] = Ratio::new(e.reduced.get(i, n).clone(), e.scale.clone());
    }
    Ok(Some(x))
}

/// Some rational solution of `C x = d` with every non-pivot coordinate zero,
/// or `None` if the system is inconsistent.
pub fn solve_particular<T: IntScalar>(c: &Matrix<T>, d: &[T]) -> Result<Option<Vec<Ratio<T>>>> {
    let n = c.cols();
    let e = Elimination::run(&augmented(c, d)?, n);
    if e.has_inconsistent_row(n) {
        return Ok(None);
    }
    let mut x = vec![Ratio::zero(); n];
    for (i, &p) in e.pivots.iter().enumerate() {
        x[p] = Ratio::new(e.reduced.get(i, n).clone(), e.scale.clone());
    }
    Ok(Some(x))
}

/// Inverse of a nonsingular square matrix as `(adjugate-like integer matrix, denominator)`,
/// so that the inverse is `matrix / denominator`.
fn integer_inverse<T: IntScalar>(m: &Matrix<T>) -> Option<(Matrix<T>, T)> {
    let n = m.rows();
    let mut rows = m.to_rows();
    for (i, row) in rows.iter_mut().enumerate() {
        row.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
    }
    let e = Elimination::run(&Matrix::from_rows(2 * n, rows).expect("square"), n);
    if e.rank() < n {
        return None;
    }
    let mut inv = Matrix::zeros(n, n);
    for (i, &p) in e.pivots.iter().enumerate() {
        for j in 0..n {
            inv.set(p, j, e.reduced.get(i, n + j).clone());
        }
    }
    Some((inv, e.scale))
}

/// `Cᵀ (C Cᵀ)⁻¹`, the minimum-norm right inverse of a full-row-rank matrix.
pub fn right_inverse<T: IntScalar>(c: &Matrix<T>) -> Result<Matrix<Ratio<T>>> {
    let ct = c.transpose();
    let gram = c.matmul(&ct)?;
    let (inv, den) = integer_inverse(&gram).ok_or(Error::DependentRows)?;
    let num = ct.matmul(&inv)?;
    Ok(num.map(|v| Ratio::new(v.clone(), den.clone())))
}

/// Integer kernel basis together with the largest absolute subdeterminant
/// of the matrix it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis<T> {
    /// `n × r` matrix whose columns span the kernel.
    pub y: Matrix<T>,
    pub delta: T,
}

impl<T: IntScalar> KernelBasis<T> {
    pub fn dimension(&self) -> usize {
        self.y.cols()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.y.cols()).map(|j| self.y.column(j)).collect()
    }
}

/// Kernel vectors from the determinantal construction, one per free column.
///
/// For free column `f` the vector has `D` at `f` and `-R[i][f]` at the pivot
/// column of row `i`, where `R` is the fraction-free reduced form and `D` its
/// common pivot value. Both are subdeterminants of `C` up to sign, so the
/// entries are bounded by the largest subdeterminant. Each vector is divided
/// by its content and oriented so the free coordinate is positive.
///
/// Works for any `C`; with dependent rows it still returns a kernel basis.
pub fn kernel_columns<T: IntScalar>(c: &Matrix<T>) -> Vec<Vec<T>> {
    kernel_from_elimination(&Elimination::run(c, c.cols()), c.cols())
}

/// The same construction from an existing elimination whose pivots lie in
/// the first `n` columns (extra carried columns are ignored).
pub fn kernel_from_elimination<T: IntScalar>(e: &Elimination<T>, n: usize) -> Vec<Vec<T>> {
    let mut is_pivot = vec![false; n];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::with_capacity(n - e.rank());
    for f in (0..n).filter(|&j| !is_pivot[j]) {
        let mut y = vec![T::zero(); n];
        y[f] = e.scale.clone();
        for (i, &p) in e.pivots.iter().enumerate() {
            y[p] = -e.reduced.get(i, f).clone();
        }
        let mut g = gcd_slice(&y);
        if y[f].is_negative() {
            g = -g;
        }
        for v in y.iter_mut() {
            *v = v.clone() / &g;
        }
        out.push(y);
    }
    out
}

/// Kernel basis of a full-row-rank matrix with its subdeterminant bound.
pub fn integer_kernel_basis<T: IntScalar>(c: &Matrix<T>) -> Result<KernelBasis<T>> {
    if rank(c) < c.rows() {
        return Err(Error::DependentRows);
    }
    let cols = kernel_columns(c);
    let y = Matrix::from_columns(c.cols(), &cols)?;
    Ok(KernelBasis { y, delta: max_abs_subdeterminant(c) })
}

/// Canonical description of the affine space `{x : C x = d}`.
///
/// Returns the reduced row echelon form of `[C | d]` with each row divided by
/// its content and a positive pivot, which is unique for a given solution
/// set. `None` if the system is inconsistent.
pub fn canonical_system<T: IntScalar>(c: &Matrix<T>, d: &[T]) -> Result<Option<(Matrix<T>, Vec<T>)>> {
    let n = c.cols();
    let e = Elimination::run(&augmented(c, d)?, n);
    if e.has_inconsistent_row(n) {
        return Ok(None);
    }
    let mut rows = Vec::with_capacity(e.rank());
    let mut rhs = Vec::with_capacity(e.rank());
    for (i, &p) in e.pivots.iter().enumerate() {
        let mut row = e.reduced.row(i).to_vec();
        let mut g = gcd_slice(&row);
        if row[p].is_negative() {
            g = -g;
        }
        for v in row.iter_mut() {
            *v = v.clone() / &g;
        }
        rhs.push(row.pop().expect("augmented row"));
        rows.push(row);
    }
    Ok(Some((Matrix::from_rows(n, rows)?, rhs)))
}

/// Affine subspace `{x : C x = d}` in the canonical form of
/// [`canonical_system`], kept so that equations can be added one at a time.
///
/// Rows are augmented (`n + 1` entries, the last is the right-hand side) and
/// sorted by pivot column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalSystem<T> {
    n: usize,
    rows: Vec<Vec<T>>,
    pivots: Vec<usize>,
}

fn make_primitive<T: IntScalar>(row: &mut [T], lead: usize) {
    let mut g = gcd_slice(row);
    if g.is_zero() {
        return;
    }
    if row[lead].is_negative() {
        g = -g;
    }
    for v in row.iter_mut() {
        *v = v.clone() / &g;
    }
}

impl<T: IntScalar> CanonicalSystem<T> {
    /// `None` if the system is inconsistent.
    pub fn new(c: &Matrix<T>, d: &[T]) -> Result<Option<Self>> {
        let n = c.cols();
        Ok(canonical_system(c, d)?.map(|(c, d)| {
            let pivots = c.row_iter().map(|r| r.iter().position(|v| !v.is_zero()).expect("nonzero row")).collect();
            let rows = c.row_iter().zip(d).map(|(r, v)| r.iter().cloned().chain(std::iter::once(v)).collect()).collect();
            CanonicalSystem { n, rows, pivots }
        }))
    }

    /// Add `row · x = value`. `None` if the result is inconsistent; an
    /// implied equation leaves the system unchanged.
    pub fn with_equation(&self, row: &[T], value: T) -> Option<Self> {
        assert_eq!(row.len(), self.n, "equation width");
        let mut v: Vec<T> = row.iter().cloned().chain(std::iter::once(value)).collect();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            let pv = r[p].clone();
            for (x, y) in v.iter_mut().zip(r) {
                *x = pv.clone() * &*x - f.clone() * y;
            }
            let g = gcd_slice(&v);
            if !g.is_zero() {
                for x in v.iter_mut() {
                    *x = x.clone() / &g;
                }
            }
        }
        let Some(lead) = v[..self.n].iter().position(|x| !x.is_zero()) else {
            return if v[self.n].is_zero() { Some(self.clone()) } else { None };
        };
        make_primitive(&mut v, lead);
        let mut out = self.clone();
        for r in out.rows.iter_mut() {
            if r[lead].is_zero() {
                continue;
            }
            let f = r[lead].clone();
            for (x, y) in r.iter_mut().zip(&v) {
                *x = v[lead].clone() * &*x - f.clone() * y;
            }
            let p = r.iter().position(|x| !x.is_zero()).expect("pivot survives");
            make_primitive(r, p);
        }
        let at = out.pivots.partition_point(|&p| p < lead);
        out.rows.insert(at, v);
        out.pivots.insert(at, lead);
        Some(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Split back into `C` and `d`.
    pub fn to_system(&self) -> (Matrix<T>, Vec<T>) {
        let c = self.rows.iter().map(|r| r[..self.n].to_vec()).collect();
        let d = self.rows.iter().map(|r| r[self.n].clone()).collect();
        (Matrix::from_rows(self.n, c).expect("rows keep their width"), d)
    }

    /// The point with all free coordinates zero.
    pub fn particular_point(&self) -> Vec<Ratio<T>> {
        let mut x = vec![Ratio::zero(); self.n];
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            x[p] = Ratio::new(r[self.n].clone(), r[p].clone());
        }
        x
    }

    /// Rescale the rows to a common pivot value, the shape produced by
    /// [`Elimination::run`]. The scale is the lcm of the pivot entries, not a
    /// determinant, and `odd_permutation` carries no meaning.
    pub fn to_elimination(&self) -> Elimination<T> {
        let scale = self.rows.iter().zip(&self.pivots).fold(T::one(), |l, (r, &p)| l.lcm(&r[p]));
        let rows = self
            .rows
            .iter()
            .zip(&self.pivots)
            .map(|(r, &p)| {
                let m = scale.clone() / &r[p];
                r.iter().map(|v| v.clone() * &m).collect()
            })
            .collect();
        let reduced = Matrix::from_rows(self.n + 1, rows).expect("rows keep their width");
        Elimination { reduced, pivots: self.pivots.clone(), scale, odd_permutation: false }
    }
}

/// Multiply a rational matrix by a rational vector.
pub fn rat_mul_vec<T: IntScalar>(m: &Matrix<Ratio<T>>, v: &[Ratio<T>]) -> Vec<Ratio<T>> {
    debug_assert_eq!(m.cols(), v.len());
    m.row_iter()
        .map(|r| r.iter().zip(v).fold(Ratio::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

/// Lift an integer vector to rationals.
pub fn to_rational<T: IntScalar>(v: &[T]) -> Vec<Ratio<T>> {
    v.iter().map(|x| Ratio::from_integer(x.clone())).collect()
}

/// Scale a rational vector by the lcm of its denominators, returning the
/// integer vector and the multiplier.
pub fn clear_denominators<T: IntScalar>(v: &[Ratio<T>]) -> (Vec<T>, T) {
    let l = crate::scalar::denominator_lcm(v);
    let ints = v.iter().map(|x| (x * Ratio::from_integer(l.clone())).to_integer()).collect();
    (ints, l)
}

/// `true` if the matrix has rank equal to its row count.
pub fn has_full_row_rank<T: IntScalar>(c: &Matrix<T>) -> bool {
    rank(c) == c.rows()
}

/// Identity check for a rational matrix.
pub fn is_identity<T: IntScalar>(m: &Matrix<Ratio<T>>) -> bool {
    m.is_square()
        && (0..m.rows()).all(|i| {
            (0..m.cols()).all(|j| {
                let v = m.get(i, j);
                if i == j { v.is_one() } else { v.is_zero() }
            })
        })
}
