//! Exact feasibility test for systems of linear inequalities.
//!
//! Phase one of the primal simplex method with Bland's rule, so it always
//! terminates. The tableau is kept integral by integer pivoting: every pivot
//! multiplies through by the new pivot element and divides exactly by the
//! previous one, the same trick as fraction-free elimination. Only used to
//! discard regions that contain no real points, never to bound objectives.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use super::matrix::Matrix;
use crate::scalar::{denominator_lcm, IntScalar};

/// Find some real `t` with `m t ≤ h`, where `t` is unrestricted in sign.
pub fn find_feasible_point<T: IntScalar>(m: &Matrix<T>, h: &[T]) -> Option<Vec<Ratio<T>>> {
    let rows = m.rows();
    let vars = m.cols();
    assert_eq!(h.len(), rows, "one bound per inequality");
    if h.iter().all(|v| !v.is_negative()) {
        return Some(vec![Ratio::zero(); vars]);
    }
    let negative = h.iter().filter(|v| v.is_negative()).count();
    // Columns: t⁺, t⁻, slacks, artificials, right-hand side. The last row is
    // the phase one objective.
    let slack0 = 2 * vars;
    let art0 = slack0 + rows;
    let width = art0 + negative + 1;
    let rhs = width - 1;
    let mut tab = vec![vec![T::zero(); width]; rows + 1];
    let mut basis = vec![0usize; rows];
    let mut next_art = art0;
    for i in 0..rows {
        let flip = h[i].is_negative();
        let sign = |v: &T| if flip { -v.clone() } else { v.clone() };
        for j in 0..vars {
            tab[i][j] = sign(m.get(i, j));
            tab[i][vars + j] = -sign(m.get(i, j));
        }
        tab[i][slack0 + i] = sign(&T::one());
        tab[i][rhs] = sign(&h[i]);
        if flip {
            tab[i][next_art] = T::one();
            basis[i] = next_art;
            next_art += 1;
        } else {
            basis[i] = slack0 + i;
        }
    }
    for i in 0..rows {
        if basis[i] >= art0 {
            for j in (0..art0).chain(std::iter::once(rhs)) {
                tab[rows][j] = tab[rows][j].clone() - tab[i][j].clone();
            }
        }
    }
    let mut denom = T::one();
    while let Some(enter) = (0..rhs).find(|&j| tab[rows][j].is_negative()) {
        // Pivot entries are positive because the common denominator is.
        let mut leave: Option<usize> = None;
        for i in 0..rows {
            if !tab[i][enter].is_positive() {
                continue;
            }
            leave = Some(match leave {
                None => i,
                Some(l) => {
                    let lhs = tab[i][rhs].clone() * &tab[l][enter];
                    let cur = tab[l][rhs].clone() * &tab[i][enter];
                    if lhs < cur || (lhs == cur && basis[i] < basis[l]) { i } else { l }
                }
            });
        }
        let l = leave.expect("phase one objective is bounded below");
        let prow = tab[l].clone();
        let pv = prow[enter].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i == l {
                continue;
            }
            let f = row[enter].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                let updated = pv.clone() * &*v - f.clone() * p;
                *v = updated / &denom;
            }
        }
        denom = pv;
        basis[l] = enter;
    }
    if !tab[rows][rhs].is_zero() {
        return None;
    }
    let mut t = vec![Ratio::zero(); vars];
    for i in 0..rows {
        let b = basis[i];
        let value = Ratio::new(tab[i][rhs].clone(), tab[i][b].clone());
        if b < vars {
            t[b] = t[b].clone() + value;
        } else if b < 2 * vars {
            t[b - vars] = t[b - vars].clone() - value;
        }
    }
    Some(t)
}

/// `true` iff `{t : m t ≤ h}` has a real point.
pub fn is_feasible<T: IntScalar>(m: &Matrix<T>, h: &[T]) -> bool {
    find_feasible_point(m, h).is_some()
}

/// Feasibility with rational right-hand sides; each row is scaled by its
/// denominator first.
pub fn is_feasible_rational<T: IntScalar>(m: &Matrix<T>, h: &[Ratio<T>]) -> bool {
    if h.iter().all(|v| !v.is_negative()) {
        return true;
    }
    let mut scaled = Vec::with_capacity(m.rows());
    let mut rhs = Vec::with_capacity(m.rows());
    for (i, v) in h.iter().enumerate() {
        let l = denominator_lcm(std::slice::from_ref(v));
        scaled.push(m.row(i).iter().map(|x| x.clone() * &l).collect());
        rhs.push((v * Ratio::from_integer(l)).to_integer());
    }
    is_feasible(&Matrix::from_rows(m.cols(), scaled).expect("same width"), &rhs)
}
