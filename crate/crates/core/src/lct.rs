//! Log canonical thresholds, bounds on `lct − fpt`, and bad primes.
//!
//! For a quasi-homogeneous isolated singularity over `Q` the log canonical
//! threshold is `min(Σw / deg f, 1) = a/b`, the same `λ` that anchors the
//! candidate lists. A prime is bad when the reduction mod `p` has
//! `fpt ≠ lct`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::basep::{euler_phi, is_prime, mult_order};
use crate::candidates::lambda_of;
use crate::error::{FptError, Result};
use crate::gradedpoly::Grading;
use crate::rational::{rat, to_fraction_string, Rational};

/// Largest sieve bound accepted by [`primes_up_to`].
pub const SIEVE_LIMIT: u64 = 1_000_000;

/// Two-sided bounds on `lct − fpt` when the two differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffBounds {
    pub lower: Rational,
    pub upper: Rational,
}

impl DiffBounds {
    /// False when `upper < lower`, i.e. `fpt = lct` is forced.
    pub fn admits_difference(&self) -> bool {
        self.lower <= self.upper
    }

    pub fn contains(&self, diff: &Rational) -> bool {
        self.lower <= *diff && *diff <= self.upper
    }
}

/// `min(Σw / deg f, 1)`. The isolated-singularity hypothesis on the
/// rational model is taken on trust.
pub fn lct_of(g: &Grading, deg_f: u64) -> Result<Rational> {
    lambda_of(g, deg_f)
}

fn check_fraction(a: u64, b: u64) -> Result<()> {
    if a == 0 || b == 0 || a > b || a.gcd(&b) != 1 {
        return Err(FptError::pre(format!(
            "{a}/{b} is not a reduced fraction in (0, 1]"
        )));
    }
    Ok(())
}

fn check_coprime_prime(b: u64, p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(FptError::NotPrime(p));
    }
    if b.is_multiple_of(p) {
        return Err(FptError::pre(format!(
            "p = {p} divides the denominator {b}"
        )));
    }
    Ok(())
}

/// `lower = 1/(b·p^ord_p(b))`, `upper = (n − 1 − 1/b)/p`.
pub fn difference_bounds(n: usize, a: u64, b: u64, p: u64) -> Result<DiffBounds> {
    check_fraction(a, b)?;
    check_coprime_prime(b, p)?;
    if n < 1 {
        return Err(FptError::pre("need at least one variable"));
    }
    let ord = mult_order(p, b)?;
    let pb = BigInt::from(p);
    let bb = BigInt::from(b);
    let lower = Rational::new(BigInt::one(), &bb * pb.pow(ord as u32));
    let upper = (Rational::from_integer(BigInt::from(n as u64 - 1))
        - Rational::new(BigInt::one(), bb))
        / Rational::from_integer(pb);
    Ok(DiffBounds { lower, upper })
}

/// True iff `p^e·a ≡ 1 (mod b)` for some `e` in `1..=ord_p(b)`; such
/// primes have `fpt ≠ lct`. Needs `a >= 2`.
pub fn is_certified_bad_prime(a: u64, b: u64, p: u64) -> Result<bool> {
    check_fraction(a, b)?;
    if a == 1 {
        return Err(FptError::pre(
            "bad-prime certificate does not apply when a = 1",
        ));
    }
    check_coprime_prime(b, p)?;
    let ord = mult_order(p, b)?;
    let (a, b, p) = (a as u128, b as u128, p as u128 % b as u128);
    let mut x = 1u128;
    for _ in 0..ord {
        x = x * p % b;
        if x * a % b == 1 {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LctShape {
    General,
    /// `lct = 1 − 1/d` with `d = b`, coming from `d − 1` variables of
    /// weight one and degree `d`.
    AlmostCalabiYau,
}

/// Lower bound on the density of bad primes: `1/φ(b)` in general,
/// `1 − 1/φ(d)` in the almost Calabi–Yau shape, `0` when `a = 1`.
pub fn bad_density_lower_bound(a: u64, b: u64, shape: LctShape) -> Result<Rational> {
    check_fraction(a, b)?;
    let phi = euler_phi(b) as i64;
    match shape {
        LctShape::AlmostCalabiYau => {
            if a + 1 != b {
                return Err(FptError::pre(format!("{a}/{b} is not of the form 1 - 1/d")));
            }
            Ok(Rational::one() - rat(1, phi))
        }
        LctShape::General if a == 1 => Ok(Rational::zero()),
        LctShape::General => Ok(rat(1, phi)),
    }
}

/// Primes `<= cap` by the sieve of Eratosthenes.
pub fn primes_up_to(cap: u64) -> Result<Vec<u64>> {
    if cap > SIEVE_LIMIT {
        return Err(FptError::Capacity(format!(
            "sieve bound {cap} exceeds {SIEVE_LIMIT}"
        )));
    }
    let cap = cap as usize;
    if cap < 2 {
        return Ok(Vec::new());
    }
    let mut composite = vec![false; cap + 1];
    let mut primes = Vec::new();
    for i in 2..=cap {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= cap {
            composite[j] = true;
            j += i;
        }
    }
    Ok(primes)
}

/// Primes in `lo..=hi`.
pub fn primes_in_range(lo: u64, hi: u64) -> Result<Vec<u64>> {
    Ok(primes_up_to(hi)?.into_iter().filter(|&p| p >= lo).collect())
}

/// `#{p <= cap : pred(p)} / #{p <= cap}` exactly.
pub fn empirical_density(pred: impl Fn(u64) -> bool, cap: u64) -> Result<Rational> {
    if cap < 2 {
        return Err(FptError::pre("density needs a prime cap of at least 2"));
    }
    let primes = primes_up_to(cap)?;
    let hits = primes.iter().filter(|&&p| pred(p)).count();
    Ok(Rational::new(
        BigInt::from(hits),
        BigInt::from(primes.len()),
    ))
}

/// One line of a bad-prime report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityRow {
    pub prime: u64,
    pub residue: u64,
    /// `None` when the certificate does not apply (`a = 1` or `p | b`).
    pub certified_bad: Option<bool>,
    pub fpt: Option<Rational>,
    pub lct: Rational,
    /// `lct − fpt` when the threshold is known.
    pub difference: Option<Rational>,
}

pub fn density_row(a: u64, b: u64, p: u64, fpt: Option<Rational>) -> Result<DensityRow> {
    check_fraction(a, b)?;
    if !is_prime(p) {
        return Err(FptError::NotPrime(p));
    }
    let certified_bad = if a == 1 || b.is_multiple_of(p) {
        None
    } else {
        Some(is_certified_bad_prime(a, b, p)?)
    };
    let lct = rat(a as i64, b as i64);
    let difference = fpt.as_ref().map(|f| &lct - f);
    Ok(DensityRow {
        prime: p,
        residue: p % b,
        certified_bad,
        fpt,
        lct,
        difference,
    })
}

pub const CSV_HEADER: &str = "prime,residue,certified_bad,fpt,lct,difference";

pub fn density_csv(rows: &[DensityRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let opt = |r: &Option<Rational>| r.as_ref().map(to_fraction_string).unwrap_or_default();
    for r in rows {
        let bad = match r.certified_bad {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.prime,
            r.residue,
            bad,
            opt(&r.fpt),
            to_fraction_string(&r.lct),
            opt(&r.difference)
        )
        .expect("writing to a String");
    }
    out
}
