//! Isolated-singularity test for quasi-homogeneous polynomials.
//!
//! With `N = n·deg f − 2·Σw`, the partials form a system of parameters
//! exactly when `J(f)` contains every graded piece of degree `> N`. Any
//! monomial of degree `> N + max w` is divisible by one of degree in
//! `[N + 1, N + max w]`, so it suffices to check that window.

use std::collections::HashMap;

use super::{
    graded_monomials, jacobian_generators, GradedPolynomial, Grading, Monomial, Polynomial,
};
use crate::error::{FptError, Result};

/// Degrees inspected by [`has_isolated_singularity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularityWindow {
    /// `n·deg f − 2·Σw`; may be negative.
    pub socle_degree: i64,
    pub lo: u64,
    pub hi: u64,
}

pub fn singularity_window(f: &GradedPolynomial) -> SingularityWindow {
    let g = f.grading();
    let n = g.nvars() as i64;
    let big_n = n * f.degree() as i64 - 2 * g.total() as i64;
    let maxw = g.max_weight() as i64;
    let lo = (big_n + 1).max(1) as u64;
    // Keep at least `max w` degrees even when `N` is very negative.
    let hi = (big_n + maxw).max(maxw) as u64;
    SingularityWindow {
        socle_degree: big_n,
        lo,
        hi,
    }
}

/// True iff `√J(f) ⊇ m`. A unit partial derivative (`f` smooth at the
/// origin) therefore counts as isolated.
pub fn has_isolated_singularity(f: &GradedPolynomial) -> bool {
    let gens = jacobian_generators(f);
    if gens.iter().any(Polynomial::has_constant_term) {
        return true;
    }
    if gens.iter().any(Polynomial::is_zero) {
        return false;
    }
    if gens.iter().all(|h| h.num_terms() == 1) {
        return monomial_radical_is_maximal(&gens);
    }
    let w = singularity_window(f);
    let jac = JacobianPieces::new(f, gens);
    (w.lo..=w.hi).all(|d| jac.rank(d) == jac.dim(d))
}

/// A monomial ideal has radical `m` iff it contains a pure power of each
/// variable.
fn monomial_radical_is_maximal(gens: &[Polynomial]) -> bool {
    let n = gens[0].nvars();
    (0..n).all(|i| {
        gens.iter().any(|h| {
            let (m, _) = h.terms().next().expect("single term");
            m.exponents()
                .iter()
                .enumerate()
                .all(|(j, &a)| j == i || a == 0)
        })
    })
}

/// `dim_k [R/J(f)]_d`.
pub fn quotient_dim(f: &GradedPolynomial, d: u64) -> usize {
    let jac = JacobianPieces::new(f, jacobian_generators(f));
    jac.dim(d) - jac.rank(d)
}

/// Coefficients `h_0 .. h_up_to` of `Π (1 − t^(deg f − w_i)) / (1 − t^(w_i))`,
/// the Hilbert series of `R/J(f)` when the partials form a regular sequence.
pub fn jacobian_hilbert_series(g: &Grading, deg_f: u64, up_to: usize) -> Result<Vec<i64>> {
    let mut h = vec![0i64; up_to + 1];
    h[0] = 1;
    for &w in g.weights() {
        let s = deg_f
            .checked_sub(w)
            .ok_or_else(|| FptError::pre(format!("deg f = {deg_f} is below a weight {w}")))?
            as usize;
        // multiply by 1 − t^s
        for k in (s..=up_to).rev() {
            h[k] -= h[k - s];
        }
        // divide by 1 − t^w
        let w = w as usize;
        for k in w..=up_to {
            h[k] += h[k - w];
        }
    }
    Ok(h)
}

struct JacobianPieces<'a> {
    grading: &'a Grading,
    prime: u64,
    gens: Vec<(Polynomial, u64)>,
}

impl<'a> JacobianPieces<'a> {
    fn new(f: &'a GradedPolynomial, gens: Vec<Polynomial>) -> Self {
        let g = f.grading();
        let gens = gens
            .into_iter()
            .zip(g.weights())
            .filter(|(h, _)| !h.is_zero())
            .map(|(h, &w)| (h, f.degree() - w))
            .collect();
        JacobianPieces {
            grading: g,
            prime: f.prime(),
            gens,
        }
    }

    fn dim(&self, d: u64) -> usize {
        graded_monomials(self.grading, d).len()
    }

    /// Rank of `J(f)_d` inside `R_d`, by sparse elimination with early exit.
    fn rank(&self, d: u64) -> usize {
        let basis = graded_monomials(self.grading, d);
        let dim = basis.len();
        let index: HashMap<Monomial, usize> =
            basis.into_iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut ech = Echelon::new(self.prime);
        for (h, dh) in &self.gens {
            let Some(rest) = d.checked_sub(*dh) else {
                continue;
            };
            for mu in graded_monomials(self.grading, rest) {
                let mut row: Vec<(usize, u64)> =
                    h.terms().map(|(m, c)| (index[&m.mul(&mu)], c)).collect();
                row.sort_unstable();
                ech.insert(row);
                if ech.rank() == dim {
                    return dim;
                }
            }
        }
        ech.rank()
    }
}

/// Sparse row echelon form over `F_p`; pivot rows are monic.
struct Echelon {
    p: u64,
    pivots: HashMap<usize, Vec<(usize, u64)>>,
}

impl Echelon {
    fn new(p: u64) -> Self {
        Echelon {
            p,
            pivots: HashMap::new(),
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn insert(&mut self, mut row: Vec<(usize, u64)>) {
        let p = self.p;
        while let Some(&(lead, v)) = row.first() {
            match self.pivots.get(&lead) {
                Some(piv) => row = axpy(&row, p - v, piv, p),
                None => {
                    let inv = inv_mod(v, p);
                    for e in &mut row {
                        e.1 = e.1 * inv % p;
                    }
                    self.pivots.insert(lead, row);
                    return;
                }
            }
        }
    }
}

/// `x + c·y` for sorted sparse rows.
fn axpy(x: &[(usize, u64)], c: u64, y: &[(usize, u64)], p: u64) -> Vec<(usize, u64)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take = match (x.get(i), y.get(j)) {
            (Some(a), Some(b)) if a.0 == b.0 => {
                let v = (a.1 + c * b.1) % p;
                i += 1;
                j += 1;
                (a.0, v)
            }
            (Some(a), Some(b)) if a.0 < b.0 => {
                i += 1;
                *a
            }
            (Some(a), None) => {
                i += 1;
                *a
            }
            (_, Some(b)) => {
                j += 1;
                (b.0, c * b.1 % p)
            }
            (None, None) => unreachable!(),
        };
        if take.1 != 0 {
            out.push(take);
        }
    }
    out
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}
