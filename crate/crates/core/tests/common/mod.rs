//! Shared oracles and fixtures for the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use fpt_core::basep::digit_stream_oracle;
use fpt_core::gradedpoly::{
    check_homogeneous, graded_monomials, GradedPolynomial, Grading, Polynomial,
};
use fpt_core::rational::Rational;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

pub fn graded(text: &str, p: u64, weights: &[u64]) -> GradedPolynomial {
    let f = Polynomial::parse(text, p, weights.len()).unwrap();
    check_homogeneous(&f, &Grading::new(weights.to_vec()).unwrap()).unwrap()
}

type Terms = HashMap<Vec<u64>, u64>;

fn terms_of(f: &Polynomial) -> Terms {
    f.terms()
        .map(|(m, c)| (m.exponents().to_vec(), c))
        .collect()
}

/// Product of two term maps, keeping only monomials accepted by `keep`.
fn product(a: &Terms, b: &Terms, p: u64, keep: impl Fn(&[u64]) -> bool) -> Terms {
    let mut out: Terms = HashMap::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Vec<u64> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            if keep(&m) {
                let slot = out.entry(m).or_insert(0);
                *slot = (*slot + ca * cb) % p;
            }
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// `ν_e` by multiplying by `f` one factor at a time, discarding monomials
/// with an exponent `>= p^e` (they span the ideal `m^[e]`).
pub fn oracle_nu(f: &Polynomial, e: u32) -> u64 {
    let p = f.prime();
    let q = p.pow(e);
    let fterms = terms_of(f);
    let mut power: Terms = HashMap::from([(vec![0; f.nvars()], 1)]);
    let mut n = 0;
    loop {
        let next = product(&power, &fterms, p, |m| m.iter().all(|&a| a < q));
        if next.is_empty() {
            return n;
        }
        power = next;
        n += 1;
    }
}

/// `ν_e` by expanding `f^N` exactly and testing whether some monomial
/// survives in `R / m^[e]`. Only for tiny cases.
pub fn oracle_nu_exact(f: &Polynomial, e: u32) -> u64 {
    let p = f.prime();
    let q = p.pow(e);
    let fterms = terms_of(f);
    let mut power: Terms = HashMap::from([(vec![0; f.nvars()], 1)]);
    let mut last_outside = 0;
    for n in 1..q {
        power = product(&power, &fterms, p, |_| true);
        if power.keys().any(|m| m.iter().all(|&a| a < q)) {
            last_outside = n;
        }
    }
    last_outside
}

/// `f^N mod m^[e]` by repeated multiplication.
pub fn oracle_power_mod(f: &Polynomial, n: u64, e: u32) -> Polynomial {
    let p = f.prime();
    let q = p.pow(e);
    let fterms = terms_of(f);
    let mut power: Terms = HashMap::from([(vec![0; f.nvars()], 1)]);
    for _ in 0..n {
        power = product(&power, &fterms, p, |m| m.iter().all(|&a| a < q));
    }
    Polynomial::from_terms(p, f.nvars(), power.into_iter().map(|(m, c)| (m, c as i64))).unwrap()
}

/// `<λ>_L` summed from long-division digits.
pub fn trunc_oracle(lambda: &Rational, p: u64, l: u64) -> Rational {
    let digits = digit_stream_oracle(lambda, p, l as usize).unwrap();
    digits
        .iter()
        .enumerate()
        .fold(Rational::zero(), |acc, (i, &d)| {
            acc + Rational::new(BigInt::from(d), BigInt::from(p).pow(i as u32 + 1))
        })
}

/// Random homogeneous polynomial in `n` variables with the given weights
/// and degree; `None` if every drawn coefficient vanished.
pub fn random_homogeneous<R: Rng>(
    rng: &mut R,
    p: u64,
    weights: &[u64],
    degree: u64,
) -> Option<GradedPolynomial> {
    let g = Grading::new(weights.to_vec()).unwrap();
    let basis = graded_monomials(&g, degree);
    let density = rng.gen_range(0.3..1.0);
    let mut terms: Vec<(Vec<u64>, i64)> = Vec::new();
    for m in basis.iter().filter(|m| !m.is_one()) {
        if rng.gen_bool(density) {
            terms.push((m.exponents().to_vec(), rng.gen_range(1..p as i64 + 1)));
        }
    }
    let f = Polynomial::from_terms(p, weights.len(), terms).ok()?;
    check_homogeneous(&f, &g).ok()
}
