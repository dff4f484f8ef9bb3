//! Integer quadratics in one variable and lines through the lattice.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg::dot;
use crate::scalar::denominator_lcm;
use crate::{Int, IntMatrix, IntVector, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnivariateOutcome {
    Infeasible,
    Unbounded,
    /// A minimiser and the minimum.
    Optimal { lambda: Int, value: Rat },
}

/// Minimise `q₂λ² + q₁λ + q₀` over integers `λ` with `coeff·λ ≤ bound` for
/// every constraint.
pub fn univariate_iqp(q2: &Rat, q1: &Rat, q0: &Rat, constraints: &[(Rat, Rat)]) -> UnivariateOutcome {
    let mut lo: Option<Int> = None;
    let mut hi: Option<Int> = None;
    for (c, bound) in constraints {
        if c.is_zero() {
            if bound.is_negative() {
                return UnivariateOutcome::Infeasible;
            }
            continue;
        }
        let limit = bound / c;
        if c.is_positive() {
            let v = limit.floor().to_integer();
            hi = Some(hi.map_or(v.clone(), |h| h.min(v)));
        } else {
            let v = limit.ceil().to_integer();
            lo = Some(lo.map_or(v.clone(), |l| l.max(v)));
        }
    }
    if let (Some(l), Some(h)) = (&lo, &hi) {
        if l > h {
            return UnivariateOutcome::Infeasible;
        }
    }
    let descends_left = q2.is_negative() || (q2.is_zero() && q1.is_positive());
    let descends_right = q2.is_negative() || (q2.is_zero() && q1.is_negative());
    if (lo.is_none() && descends_left) || (hi.is_none() && descends_right) {
        return UnivariateOutcome::Unbounded;
    }
    let eval = |l: &Int| {
        let l = Rat::from_integer(l.clone());
        q2 * &l * &l + q1 * &l + q0
    };
    let mut candidates: Vec<Int> = lo.iter().chain(hi.iter()).cloned().collect();
    if q2.is_positive() {
        let vertex = -q1 / (q2 * Rat::from_integer(Int::from(2)));
        for v in [vertex.floor().to_integer(), vertex.ceil().to_integer()] {
            let v = match (&lo, &hi) {
                (Some(l), _) if v < *l => l.clone(),
                (_, Some(h)) if v > *h => h.clone(),
                _ => v,
            };
            candidates.push(v);
        }
    }
    if candidates.is_empty() {
        // Constant objective on the whole line.
        candidates.push(Int::zero());
    }
    let best = candidates
        .into_iter()
        .map(|l| (eval(&l), l))
        .min()
        .expect("at least one candidate");
    UnivariateOutcome::Optimal { lambda: best.1, value: best.0 }
}

/// `λ ≡ r (mod m)` with `0 ≤ r < m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Progression {
    pub residue: Int,
    pub modulus: Int,
}

fn combine(a: &Progression, b: &Progression) -> Option<Progression> {
    let e = a.modulus.extended_gcd(&b.modulus);
    let g = e.gcd;
    let diff = &b.residue - &a.residue;
    if !(&diff % &g).is_zero() {
        return None;
    }
    let modulus = a.modulus.lcm(&b.modulus);
    // a.residue + a.modulus·k hits b's class for k = diff/g · x.
    let k = (&diff / &g) * &e.x;
    let residue = (&a.residue + &a.modulus * k).mod_floor(&modulus);
    Some(Progression { residue, modulus })
}

/// Values of `λ` for which `λu + w` is integral, or `None` if there are none.
pub fn integral_progression(u: &[Rat], w: &[Rat]) -> Option<Progression> {
    let all: Vec<Rat> = u.iter().chain(w).cloned().collect();
    let l = denominator_lcm(&all);
    let mut acc = Progression { residue: Int::zero(), modulus: Int::one() };
    for (ui, wi) in u.iter().zip(w) {
        let big_u = (ui * Rat::from_integer(l.clone())).to_integer();
        let big_w = (wi * Rat::from_integer(l.clone())).to_integer();
        // big_u·λ ≡ −big_w (mod l)
        let g = big_u.gcd(&l);
        let target = -big_w;
        if !(&target % &g).is_zero() {
            return None;
        }
        let m = &l / &g;
        let residue = if m.is_one() {
            Int::zero()
        } else {
            let inv = (&big_u / &g).extended_gcd(&m).x;
            ((&target / &g) * inv).mod_floor(&m)
        };
        acc = combine(&acc, &Progression { residue, modulus: m })?;
    }
    Some(acc)
}

/// Reparametrise the line `λu + w` over its integral points as `s·u' + w'`
/// with integer `u'`, `w'`, and minimise `xᵀQx` subject to `Ax ≤ b` along it.
pub fn line_problem(q: &IntMatrix, a: &IntMatrix, b: &[Int], u: &[Rat], w: &[Rat]) -> UnivariateOutcome {
    let Some(p) = integral_progression(u, w) else {
        return UnivariateOutcome::Infeasible;
    };
    let modulus = Rat::from_integer(p.modulus);
    let residue = Rat::from_integer(p.residue);
    let step: IntVector = u.iter().map(|v| (v * &modulus).to_integer()).collect();
    let start: IntVector = u.iter().zip(w).map(|(ui, wi)| (ui * &residue + wi).to_integer()).collect();
    let qs = q.mul_vec(&step).expect("dimensions");
    let qw = q.mul_vec(&start).expect("dimensions");
    let q2 = dot(&step, &qs);
    let q1 = dot(&step, &qw) + dot(&start, &qs);
    let q0 = dot(&start, &qw);
    let constraints: Vec<(Rat, Rat)> = a
        .row_iter()
        .zip(b)
        .map(|(row, bj)| (Rat::from_integer(dot(row, &step)), Rat::from_integer(bj - dot(row, &start))))
        .collect();
    univariate_iqp(&Rat::from_integer(q2), &Rat::from_integer(q1), &Rat::from_integer(q0), &constraints)
}
