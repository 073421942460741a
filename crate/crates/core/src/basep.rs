//! Base-`p` digit calculus for rationals in `(0, 1]`.
//!
//! Every rational in `(0, 1]` has a unique *non-terminating* base-`p`
//! expansion (digits not eventually zero), so `1 = .(p-1)(p-1)...` and
//! `1/4 = .0 : 0 : 1 : 1 : ...` in base 2. Digits and truncations are
//! computed from closed formulas in terms of least positive residues,
//! which keeps the cost independent of the depth `e` apart from one
//! modular exponentiation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{FptError, Result};
use crate::rational::{in_unit_interval, Rational};

/// Truncation depth: a finite number of digits, or the whole expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Depth {
    Finite(u64),
    Infinite,
}

/// Least positive residue of `m` modulo `b`: the unique `r` in `1..=b`
/// with `r ≡ m (mod b)`. Note `lpr(kb, b) = b`, never 0.
pub fn lpr(m: &BigInt, b: &BigInt) -> Result<BigInt> {
    if !b.is_positive() {
        return Err(FptError::pre(format!(
            "lpr modulus must be positive, got {b}"
        )));
    }
    Ok(lpr_unchecked(m, b))
}

pub(crate) fn lpr_unchecked(m: &BigInt, b: &BigInt) -> BigInt {
    let r = m.mod_floor(b);
    if r.is_zero() {
        b.clone()
    } else {
        r
    }
}

/// `lpr(a * p^e, b)`, via modular exponentiation.
pub(crate) fn lpr_scaled(a: &BigInt, p: u64, e: u64, b: &BigInt) -> BigInt {
    let pe = BigInt::from(p).modpow(&BigInt::from(e), b);
    lpr_unchecked(&(a * pe), b)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn euler_phi(mut b: u64) -> u64 {
    let mut result = b;
    let mut d = 2u64;
    while d * d <= b {
        if b.is_multiple_of(d) {
            while b.is_multiple_of(d) {
                b /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if b > 1 {
        result -= result / b;
    }
    result
}

/// Multiplicative order of `p` modulo `b`: the least `k >= 1` with
/// `p^k ≡ 1 (mod b)`. By convention the order modulo 1 is 1.
pub fn mult_order(p: u64, b: u64) -> Result<u64> {
    if b == 0 {
        return Err(FptError::pre("order modulo 0 is undefined"));
    }
    if p.gcd(&b) != 1 {
        return Err(FptError::pre(format!(
            "gcd({p}, {b}) != 1, order undefined"
        )));
    }
    if b == 1 {
        return Ok(1);
    }
    let (p, b) = (p as u128 % b as u128, b as u128);
    let mut x = p;
    let mut k = 1u64;
    while x != 1 {
        x = x * p % b;
        k += 1;
    }
    Ok(k)
}

fn check_unit(lambda: &Rational) -> Result<()> {
    if in_unit_interval(lambda) {
        Ok(())
    } else {
        Err(FptError::pre(format!("{lambda} is not in (0, 1]")))
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(FptError::NotPrime(p))
    }
}

/// `e`-th digit (`e >= 1`) of the non-terminating expansion of `a/b`,
/// where the fraction need not be in lowest terms.
pub fn digit_of_fraction(a: &BigInt, b: &BigInt, p: u64, e: u64) -> Result<u64> {
    check_prime(p)?;
    if e == 0 {
        return Err(FptError::pre("digits are indexed from 1"));
    }
    if !b.is_positive() || !a.is_positive() || a > b {
        return Err(FptError::pre(format!("{a}/{b} is not in (0, 1]")));
    }
    let prev = lpr_scaled(a, p, e - 1, b);
    let cur = lpr_scaled(a, p, e, b);
    let d = (prev * BigInt::from(p) - cur) / b;
    Ok(d.to_u64().expect("digit lies in [0, p-1]"))
}

/// `e`-th digit of the non-terminating base-`p` expansion of `lambda`.
pub fn digit(lambda: &Rational, p: u64, e: u64) -> Result<u64> {
    check_unit(lambda)?;
    digit_of_fraction(lambda.numer(), lambda.denom(), p, e)
}

/// The integer `p^e * <lambda>_e`.
pub fn scaled_truncation(lambda: &Rational, p: u64, e: u64) -> Result<BigInt> {
    check_unit(lambda)?;
    check_prime(p)?;
    Ok(scaled_truncation_unchecked(lambda, p, e))
}

pub(crate) fn scaled_truncation_unchecked(lambda: &Rational, p: u64, e: u64) -> BigInt {
    let (a, b) = (lambda.numer(), lambda.denom());
    let pe = BigInt::from(p).pow(e as u32);
    (a * &pe - lpr_scaled(a, p, e, b)) / b
}

/// `<lambda>_e`: the first `e` digits of the non-terminating expansion.
/// `<lambda>_0 = 0` and `<lambda>_∞ = lambda`.
pub fn truncation(lambda: &Rational, p: u64, depth: Depth) -> Result<Rational> {
    check_unit(lambda)?;
    check_prime(p)?;
    Ok(truncation_unchecked(lambda, p, depth))
}

pub(crate) fn truncation_unchecked(lambda: &Rational, p: u64, depth: Depth) -> Rational {
    match depth {
        Depth::Infinite => lambda.clone(),
        Depth::Finite(e) => {
            let (a, b) = (lambda.numer(), lambda.denom());
            let r = lpr_scaled(a, p, e, b);
            let pe = BigInt::from(p).pow(e as u32);
            lambda - Rational::new(r, b * pe)
        }
    }
}

/// Value of the tail `.c^(s) : c^(s+1) : ...` (base `p`), i.e.
/// `p^(s-1) * (c - <c>_(s-1))`.
pub fn tail_value(c: &Rational, p: u64, s: u64) -> Result<Rational> {
    check_unit(c)?;
    check_prime(p)?;
    if s == 0 {
        return Err(FptError::pre("tails are indexed from 1"));
    }
    Ok(tail_value_unchecked(c, p, s))
}

pub(crate) fn tail_value_unchecked(c: &Rational, p: u64, s: u64) -> Rational {
    let (a, b) = (c.numer(), c.denom());
    Rational::new(lpr_scaled(a, p, s - 1, b), b.clone())
}

/// First `count` digits by plain long division, with the terminating
/// expansion rewritten into its non-terminating form. Independent of the
/// residue formulas used by [`digit`] and [`truncation`].
pub fn digit_stream_oracle(lambda: &Rational, p: u64, count: usize) -> Result<Vec<u64>> {
    check_unit(lambda)?;
    check_prime(p)?;
    let b = lambda.denom().clone();
    let pb = BigInt::from(p);
    let mut digits = Vec::with_capacity(count);
    // Integer part 1 means lambda = 1 = .(p-1)(p-1)...
    let mut rem = lambda.numer() % &b;
    let mut terminated = lambda.is_one();
    while digits.len() < count {
        if terminated {
            digits.push(p - 1);
            continue;
        }
        let scaled = &rem * &pb;
        let d = (&scaled / &b).to_u64().expect("digit fits");
        rem = scaled % &b;
        if rem.is_zero() {
            // .d1 ... dk 0 0 ... == .d1 ... (dk - 1) (p-1) (p-1) ...
            digits.push(d - 1);
            terminated = true;
        } else {
            digits.push(d);
        }
    }
    Ok(digits)
}

/// `Δ_e = p^e <beta>_e - p^e <alpha>_e` for `e = 1..=e_max`, together with
/// the first index at which it becomes nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSequence {
    pub deltas: Vec<BigInt>,
    pub first_nonzero: Option<u64>,
}

pub fn delta_sequence(
    alpha: &Rational,
    beta: &Rational,
    p: u64,
    e_max: u64,
) -> Result<DeltaSequence> {
    check_unit(alpha)?;
    check_unit(beta)?;
    check_prime(p)?;
    if alpha > beta {
        return Err(FptError::pre(format!(
            "delta sequence needs alpha <= beta, got {alpha} > {beta}"
        )));
    }
    let deltas: Vec<BigInt> = (1..=e_max)
        .map(|e| scaled_truncation_unchecked(beta, p, e) - scaled_truncation_unchecked(alpha, p, e))
        .collect();
    let first_nonzero = deltas
        .iter()
        .position(|d| !d.is_zero())
        .map(|i| i as u64 + 1);
    Ok(DeltaSequence {
        deltas,
        first_nonzero,
    })
}

/// Colon-separated digit list, as in `.1 : 2 : 3`.
pub fn format_digits(digits: &[u64]) -> String {
    let body: Vec<String> = digits.iter().map(u64::to_string).collect();
    format!(".{}", body.join(" : "))
}

/// Exponent of `p` in `n` together with the cofactor.
pub(crate) fn split_prime_power(n: &BigInt, p: u64) -> (u64, BigInt) {
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    while !n.is_zero() && (&n % &pb).is_zero() {
        n /= &pb;
        k += 1;
    }
    (k, n)
}

/// `⌈log2(m)⌉` for `m >= 1`.
pub(crate) fn ceil_log2(m: u64) -> u64 {
    if m <= 1 {
        0
    } else {
        64 - (m - 1).leading_zeros() as u64
    }
}
