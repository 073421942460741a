//! Sparse multivariate polynomials over `F_p` with weighted gradings.
//!
//! Terms live in a `BTreeMap` keyed by exponent vector, so iteration order
//! (lexicographic on exponents) and the text form are reproducible. The
//! ideal `m^[e] = (x_1^(p^e), ..., x_n^(p^e))` is monomial, so reducing
//! modulo it just drops terms with an exponent `>= p^e`.

mod parse;
mod singular;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::basep::is_prime;
use crate::error::{FptError, Result};

pub use singular::{
    has_isolated_singularity, jacobian_hilbert_series, quotient_dim, singularity_window,
    SingularityWindow,
};

/// Largest supported characteristic; coefficients are stored as `u64`
/// and products of two residues must not overflow.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

/// Exponent vector `x_1^a_1 ... x_n^a_n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u64>);

impl Monomial {
    pub fn new(exponents: Vec<u64>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize, exp: u64) -> Self {
        let mut v = vec![0; nvars];
        v[i] = exp;
        Monomial(v)
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `Σ a_i w_i`; the caller guarantees matching lengths.
    pub(crate) fn degree_unchecked(&self, weights: &[u64]) -> u64 {
        self.0.iter().zip(weights).map(|(a, w)| a * w).sum()
    }
}

/// Positive weight vector `deg x_i = w_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grading {
    weights: Vec<u64>,
}

impl Grading {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(FptError::InvalidGrading("no variables".into()));
        }
        if let Some(i) = weights.iter().position(|&w| w == 0) {
            return Err(FptError::InvalidGrading(format!(
                "weight of variable {} is 0",
                i + 1
            )));
        }
        Ok(Grading { weights })
    }

    pub fn standard(nvars: usize) -> Self {
        Grading {
            weights: vec![1; nvars.max(1)],
        }
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    /// `Σ deg x_i`.
    pub fn total(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn max_weight(&self) -> u64 {
        *self.weights.iter().max().expect("nonempty")
    }
}

pub fn weighted_degree(m: &Monomial, g: &Grading) -> Result<u64> {
    if m.nvars() != g.nvars() {
        return Err(FptError::Dimension {
            expected: g.nvars(),
            got: m.nvars(),
        });
    }
    Ok(m.degree_unchecked(g.weights()))
}

/// All monomials of weighted degree exactly `d`, in lexicographic order.
pub fn graded_monomials(g: &Grading, d: u64) -> Vec<Monomial> {
    fn go(w: &[u64], i: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Monomial>) {
        if i + 1 == w.len() {
            if left.is_multiple_of(w[i]) {
                cur[i] = left / w[i];
                out.push(Monomial(cur.clone()));
                cur[i] = 0;
            }
            return;
        }
        for a in 0..=left / w[i] {
            cur[i] = a;
            go(w, i + 1, left - a * w[i], cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; g.nvars()];
    go(g.weights(), 0, d, &mut cur, &mut out);
    out
}

/// Dimension of the degree-`d` piece of the polynomial ring.
pub fn graded_dim(g: &Grading, d: u64) -> usize {
    graded_monomials(g, d).len()
}

/// `p^e`, or `None` when it exceeds every representable exponent (in which
/// case reduction modulo `m^[e]` is the identity).
pub fn frobenius_bound(p: u64, e: u32) -> Option<u64> {
    p.checked_pow(e)
}

/// Polynomial over `F_p` with coefficients in `1..p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    prime: u64,
    nvars: usize,
    terms: BTreeMap<Monomial, u64>,
}

impl Polynomial {
    pub fn zero(prime: u64, nvars: usize) -> Result<Self> {
        if !is_prime(prime) {
            return Err(FptError::NotPrime(prime));
        }
        if prime > MAX_PRIME {
            return Err(FptError::PrimeTooLarge(prime));
        }
        if nvars == 0 {
            return Err(FptError::pre("polynomial ring needs at least one variable"));
        }
        Ok(Polynomial {
            prime,
            nvars,
            terms: BTreeMap::new(),
        })
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; coefficients
    /// are reduced modulo `p` and like terms combined.
    pub fn from_terms<I>(prime: u64, nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u64>, i64)>,
    {
        let mut f = Polynomial::zero(prime, nvars)?;
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(FptError::Dimension {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            let c = c.rem_euclid(prime as i64) as u64;
            f.add_term(Monomial(exps), c);
        }
        Ok(f)
    }

    pub fn constant(prime: u64, nvars: usize, c: i64) -> Result<Self> {
        Polynomial::from_terms(prime, nvars, [(vec![0; nvars], c)])
    }

    /// Parses the text grammar, e.g. `x^15 + x*y^7` or `x1^7 + 3*x2*x3^6`.
    pub fn parse(text: &str, prime: u64, nvars: usize) -> Result<Self> {
        parse::parse_polynomial(text, prime, nvars)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn has_constant_term(&self) -> bool {
        self.terms.contains_key(&Monomial::one(self.nvars))
    }

    /// Largest single exponent over all terms.
    pub fn max_exponent(&self) -> u64 {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().copied())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: u64) {
        let p = self.prime;
        let c = c % p;
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = (*o.get() + c) % p;
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub(crate) fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.prime != other.prime {
            return Err(FptError::PrimeMismatch {
                left: self.prime,
                right: other.prime,
            });
        }
        if self.nvars != other.nvars {
            return Err(FptError::Dimension {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    fn assert_compatible(&self, other: &Polynomial) {
        if let Err(e) = self.check_compatible(other) {
            panic!("incompatible polynomials: {e}");
        }
    }

    pub fn scale(&self, c: i64) -> Polynomial {
        let p = self.prime;
        let c = c.rem_euclid(p as i64) as u64;
        let mut out = Polynomial {
            prime: p,
            nvars: self.nvars,
            terms: BTreeMap::new(),
        };
        if c != 0 {
            for (m, v) in self.terms() {
                out.terms.insert(m.clone(), v * c % p);
            }
        }
        out
    }

    /// Multiplication by `x^m`.
    pub fn shift(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            prime: self.prime,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, &c)| (k.mul(m), c)).collect(),
        }
    }

    /// Exact power by repeated squaring (no reduction).
    pub fn pow(&self, mut n: u64) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::constant(self.prime, self.nvars, 1).expect("valid ring");
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative in variable `i` over `F_p`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        let p = self.prime;
        let mut out = Polynomial {
            prime: p,
            nvars: self.nvars,
            terms: BTreeMap::new(),
        };
        for (m, c) in self.terms() {
            let a = m.0[i];
            let k = c * (a % p) % p;
            if k != 0 {
                let mut exps = m.0.clone();
                exps[i] -= 1;
                out.add_term(Monomial(exps), k);
            }
        }
        out
    }

    /// Canonical representative of `f` in `R / m^[e]`: drops every term with
    /// some exponent `>= p^e`.
    pub fn reduce_mod_frobenius(&self, e: u32) -> Polynomial {
        match frobenius_bound(self.prime, e) {
            None => self.clone(),
            Some(q) => Polynomial {
                prime: self.prime,
                nvars: self.nvars,
                terms: self
                    .terms
                    .iter()
                    .filter(|(m, _)| m.0.iter().all(|&a| a < q))
                    .map(|(m, &c)| (m.clone(), c))
                    .collect(),
            },
        }
    }

    /// `a * b` reduced modulo `m^[e]`, never forming terms outside the box.
    pub fn mul_mod_frobenius(&self, other: &Polynomial, e: u32) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let bound = frobenius_bound(self.prime, e);
        let a = self.reduce_mod_frobenius(e);
        let b = other.reduce_mod_frobenius(e);
        let p = self.prime;
        let mut out = Polynomial {
            prime: p,
            nvars: self.nvars,
            terms: BTreeMap::new(),
        };
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let m = ma.mul(mb);
                if let Some(q) = bound {
                    if m.0.iter().any(|&x| x >= q) {
                        continue;
                    }
                }
                out.add_term(m, ca * cb % p);
            }
        }
        Ok(out)
    }

    /// `f^p`, computed exactly as `Σ c x^(p·a)` (coefficients satisfy `c^p = c`).
    pub fn frobenius_twist(&self) -> Polynomial {
        let p = self.prime;
        Polynomial {
            prime: p,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (Monomial(m.0.iter().map(|a| a * p).collect()), c))
                .collect(),
        }
    }

    /// `Σ_i w_i x_i ∂_i f`.
    fn euler_operator(&self, g: &Grading) -> Polynomial {
        let mut out = Polynomial {
            prime: self.prime,
            nvars: self.nvars,
            terms: BTreeMap::new(),
        };
        for (i, &w) in g.weights().iter().enumerate() {
            let term = self
                .derivative(i)
                .shift(&Monomial::var(self.nvars, i, 1))
                .scale(w as i64);
            out = &out + &term;
        }
        out
    }

    pub(crate) fn variable_name(nvars: usize, i: usize) -> String {
        if nvars <= 3 {
            ["x", "y", "z"][i].to_string()
        } else {
            format!("x{}", i + 1)
        }
    }
}

impl fmt::Display for Polynomial {
    /// Terms in descending lexicographic order, e.g. `x^15 + x*y^7`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors = Vec::new();
            if c != 1 || m.is_one() {
                factors.push(c.to_string());
            }
            for (i, &a) in m.0.iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(Polynomial::variable_name(self.nvars, i)),
                    _ => factors.push(format!(
                        "{}^{}",
                        Polynomial::variable_name(self.nvars, i),
                        a
                    )),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1)
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    /// Exact product. Panics if the rings differ.
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.assert_compatible(rhs);
        let p = self.prime;
        let mut out = Polynomial {
            prime: p,
            nvars: self.nvars,
            terms: BTreeMap::new(),
        };
        for (ma, ca) in self.terms() {
            for (mb, cb) in rhs.terms() {
                out.add_term(ma.mul(mb), ca * cb % p);
            }
        }
        out
    }
}

/// A nonzero polynomial in `m`, homogeneous for a given grading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPolynomial {
    poly: Polynomial,
    grading: Grading,
    degree: u64,
}

impl GradedPolynomial {
    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn prime(&self) -> u64 {
        self.poly.prime
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars
    }
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

/// Validates that `f` is nonzero, lies in `m`, and that all its terms share
/// one weighted degree.
pub fn check_homogeneous(f: &Polynomial, g: &Grading) -> Result<GradedPolynomial> {
    if f.nvars() != g.nvars() {
        return Err(FptError::Dimension {
            expected: g.nvars(),
            got: f.nvars(),
        });
    }
    if f.is_zero() || f.has_constant_term() {
        return Err(FptError::NotInMaximalIdeal);
    }
    let mut terms = f.terms();
    let (m0, _) = terms.next().expect("nonzero");
    let d0 = m0.degree_unchecked(g.weights());
    for (m, _) in terms {
        let d = m.degree_unchecked(g.weights());
        if d != d0 {
            let show = |m: &Monomial| {
                Polynomial {
                    prime: f.prime,
                    nvars: f.nvars,
                    terms: BTreeMap::from([(m.clone(), 1)]),
                }
                .to_string()
            };
            return Err(FptError::Inhomogeneous {
                first: show(m0),
                first_degree: d0,
                second: show(m),
                second_degree: d,
            });
        }
    }
    Ok(GradedPolynomial {
        poly: f.clone(),
        grading: g.clone(),
        degree: d0,
    })
}

/// The `n` partial derivatives over `F_p` (zero entries kept).
pub fn jacobian_generators(f: &GradedPolynomial) -> Vec<Polynomial> {
    (0..f.nvars()).map(|i| f.poly.derivative(i)).collect()
}

/// Checks Euler's relation `deg f · f = Σ w_i x_i ∂_i f`; requires `p ∤ deg f`.
pub fn euler_membership_check(f: &GradedPolynomial) -> Result<bool> {
    let p = f.prime();
    if f.degree.is_multiple_of(p) {
        return Err(FptError::pre(format!(
            "p = {p} divides deg f = {}",
            f.degree
        )));
    }
    let lhs = f.poly.scale((f.degree % p) as i64);
    Ok(lhs == f.poly.euler_operator(&f.grading))
}
