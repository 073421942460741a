//! Finite candidate lists for the F-pure threshold.
//!
//! With `λ = min(Σw / deg f, 1) = a/b`, either `fpt = λ` or
//! `fpt = <λ>_L − E/p^L` for a pair `(L, E)` constrained by residues of
//! `a·p^L` modulo `b`. The functions here enumerate those pairs, merge
//! coinciding values, and apply digit-level filters that every threshold
//! must pass.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::basep::{
    ceil_log2, euler_phi, is_prime, lpr_scaled, lpr_unchecked, mult_order,
    scaled_truncation_unchecked, split_prime_power, tail_value_unchecked, truncation_unchecked,
    Depth,
};
use crate::error::{FptError, Result};
use crate::gradedpoly::Grading;
use crate::rational::{rat, to_fraction_string, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Lambda,
    Pair { l: u64, e: u64 },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Lambda => write!(f, "lambda"),
            Provenance::Pair { l, e } => write!(f, "({l},{e})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FilterTag {
    /// No tail of the expansion is smaller than the value itself.
    DigitMinimality,
    /// Differs from `λ` within the first `ord_p(b)` digits.
    FirstDifference,
}

impl fmt::Display for FilterTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterTag::DigitMinimality => write!(f, "digit-min"),
            FilterTag::FirstDifference => write!(f, "first-diff"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub value: Rational,
    /// Every way the value arises, sorted.
    pub provenance: Vec<Provenance>,
    pub filters_passed: BTreeSet<FilterTag>,
}

impl Candidate {
    pub fn is_lambda(&self) -> bool {
        self.provenance.contains(&Provenance::Lambda)
    }

    /// Smallest `L` among the pair provenances, `None` for `λ`.
    pub fn min_l(&self) -> Option<u64> {
        self.provenance
            .iter()
            .filter_map(|p| match p {
                Provenance::Pair { l, .. } => Some(*l),
                Provenance::Lambda => None,
            })
            .min()
    }
}

fn check_lambda(a: u64, b: u64) -> Result<Rational> {
    if a == 0 || b == 0 || a > b || a.gcd(&b) != 1 {
        return Err(FptError::pre(format!(
            "{a}/{b} is not a reduced fraction in (0, 1]"
        )));
    }
    Ok(rat(a as i64, b as i64))
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(FptError::NotPrime(p))
    }
}

/// `min(Σw / deg f, 1)` in lowest terms.
pub fn lambda_of(g: &Grading, deg_f: u64) -> Result<Rational> {
    if deg_f == 0 {
        return Err(FptError::pre("deg f must be positive"));
    }
    let rho = Rational::new(BigInt::from(g.total()), BigInt::from(deg_f));
    Ok(rho.min(Rational::one()))
}

/// `λ` as a pair of machine integers.
pub fn lambda_parts(lambda: &Rational) -> Result<(u64, u64)> {
    match (lambda.numer().to_u64(), lambda.denom().to_u64()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(FptError::Capacity(format!(
            "λ = {lambda} does not fit in 64 bits"
        ))),
    }
}

/// `M = 2·φ(b) + ⌈log2(n − 1)⌉`.
pub fn uniform_l_bound(n: usize, b: u64) -> Result<u64> {
    if n < 2 || b == 0 {
        return Err(FptError::pre(format!(
            "uniform L bound needs n >= 2 and b >= 1, got n = {n}, b = {b}"
        )));
    }
    Ok(2 * euler_phi(b) + ceil_log2(n as u64 - 1))
}

/// `μ_L = ⌈(lpr(a p^L, b) + a) / b⌉`, which lies in `{1, 2}`.
fn mu(a: &BigInt, b: &BigInt, p: u64, l: u64) -> i64 {
    let r = lpr_scaled(a, p, l, b);
    Integer::div_ceil(&(r + a), b)
        .to_i64()
        .expect("μ is 1 or 2")
}

/// `a < lpr(a p^e, b)` for every `1 <= e <= l − 1`.
fn residues_exceed_a(a: &BigInt, b: &BigInt, p: u64, l: u64) -> bool {
    (1..l).all(|e| lpr_scaled(a, p, e, b) > *a)
}

/// Collects values keyed by value, merging provenances.
#[derive(Default)]
struct Pool(BTreeMap<Rational, BTreeSet<Provenance>>);

impl Pool {
    fn add(&mut self, value: Rational, prov: Provenance) {
        if value.is_positive() {
            self.0.entry(value).or_default().insert(prov);
        }
    }

    /// Largest value first.
    fn finish(self) -> Vec<Candidate> {
        self.0
            .into_iter()
            .rev()
            .map(|(value, provs)| Candidate {
                value,
                provenance: provs.into_iter().collect(),
                filters_passed: BTreeSet::new(),
            })
            .collect()
    }
}

/// `{λ} ∪ {<λ>_L − E/p^L}` over all admissible `(L, E)` for `n` variables.
///
/// For `p > (n − 2)·b`, `L <= ord_p(b)` and (when also `p > b`) pairs with
/// some `lpr(a p^e, b) <= a`, `e < L`, are dropped; for smaller `p`, `L`
/// ranges up to `2·φ(b) + ⌈log2(n − 1)⌉`.
pub fn main_candidates(n: usize, a: u64, b: u64, p: u64) -> Result<Vec<Candidate>> {
    let lambda = check_lambda(a, b)?;
    check_prime(p)?;
    if n == 0 {
        return Err(FptError::pre("n must be positive"));
    }
    if b.is_multiple_of(p) {
        return Err(FptError::pre(format!(
            "p = {p} divides the denominator b = {b}"
        )));
    }
    let large = (p as i128) > (n as i128 - 2) * b as i128;
    let l_max = if large {
        mult_order(p, b)?
    } else {
        uniform_l_bound(n.max(2), b)?
    };
    let (ab, bb) = (BigInt::from(a), BigInt::from(b));
    let mut pool = Pool::default();
    pool.add(lambda.clone(), Provenance::Lambda);
    for l in 1..=l_max {
        let e_max = n as i64 - 1 - mu(&ab, &bb, p, l);
        if e_max < 0 {
            continue;
        }
        if large && p > b && !residues_exceed_a(&ab, &bb, p, l) {
            continue;
        }
        let trunc = truncation_unchecked(&lambda, p, Depth::Finite(l));
        let pl = BigInt::from(p).pow(l as u32);
        for e in 0..=e_max as u64 {
            let value = &trunc - Rational::new(BigInt::from(e), pl.clone());
            pool.add(value, Provenance::Pair { l, e });
        }
    }
    Ok(pool.finish())
}

/// `{λ} ∪ {<λ>_L}` for two variables, where `1 <= lpr(a p^L, b) <= b − a`,
/// `L <= ord_p(b)`, and, when `p > b`, `a < lpr(a p^e, b)` for `e < L`.
pub fn two_variable_candidates(a: u64, b: u64, p: u64) -> Result<Vec<Candidate>> {
    let lambda = check_lambda(a, b)?;
    check_prime(p)?;
    if b.is_multiple_of(p) {
        return Err(FptError::pre(format!(
            "p = {p} divides the denominator b = {b}"
        )));
    }
    let (ab, bb) = (BigInt::from(a), BigInt::from(b));
    let mut pool = Pool::default();
    pool.add(lambda.clone(), Provenance::Lambda);
    for l in 1..=mult_order(p, b)? {
        if lpr_scaled(&ab, p, l, &bb) > BigInt::from(b - a) {
            continue;
        }
        if p > b && !residues_exceed_a(&ab, &bb, p, l) {
            continue;
        }
        pool.add(
            truncation_unchecked(&lambda, p, Depth::Finite(l)),
            Provenance::Pair { l, e: 0 },
        );
    }
    Ok(pool.finish())
}

/// Number of tails that can differ for `c`: the preperiod (the power of
/// `p` in the denominator) plus one period.
pub fn full_tail_depth(c: &Rational, p: u64) -> u64 {
    let (k, cofactor) = split_prime_power(c.denom(), p);
    let period = cofactor
        .to_u64()
        .map_or(1, |m| mult_order(p, m).unwrap_or(1));
    k + period
}

fn passes_digit_minimality(c: &Rational, p: u64, depth: u64) -> bool {
    (2..=depth).all(|s| tail_value_unchecked(c, p, s) >= *c)
}

/// Drops every candidate exceeding one of its own tails
/// `.c_s : c_(s+1) : ...` for `2 <= s <= depth`.
pub fn digit_minimality_filter(
    cands: Vec<Candidate>,
    p: u64,
    depth: u64,
) -> Result<Vec<Candidate>> {
    check_prime(p)?;
    if depth == 0 {
        return Err(FptError::pre("filter depth must be at least 1"));
    }
    Ok(cands
        .into_iter()
        .filter(|c| passes_digit_minimality(&c.value, p, depth))
        .map(|mut c| {
            c.filters_passed.insert(FilterTag::DigitMinimality);
            c
        })
        .collect())
}

/// [`digit_minimality_filter`] with each candidate checked at its own
/// [`full_tail_depth`], which covers every tail.
pub fn digit_minimality_filter_exhaustive(cands: Vec<Candidate>, p: u64) -> Result<Vec<Candidate>> {
    check_prime(p)?;
    Ok(cands
        .into_iter()
        .filter(|c| passes_digit_minimality(&c.value, p, full_tail_depth(&c.value, p)))
        .map(|mut c| {
            c.filters_passed.insert(FilterTag::DigitMinimality);
            c
        })
        .collect())
}

/// Keeps `λ` and the candidates whose first `ord_p(b)` digits differ from
/// those of `λ`; a threshold below `λ` always does.
pub fn first_difference_filter(
    cands: Vec<Candidate>,
    lambda: &Rational,
    p: u64,
) -> Result<Vec<Candidate>> {
    let (_, b) = lambda_parts(lambda)?;
    let s = mult_order(p, b)?;
    let target = scaled_truncation_unchecked(lambda, p, s);
    Ok(cands
        .into_iter()
        .filter(|c| c.value == *lambda || scaled_truncation_unchecked(&c.value, p, s) != target)
        .map(|mut c| {
            c.filters_passed.insert(FilterTag::FirstDifference);
            c
        })
        .collect())
}

/// Candidates when `deg f = Σw + 1 = d` and `p > (n − 2)·d`:
/// `1 − 1/d` (only for `p ≡ 1 mod d`) and
/// `1 − 1/d − (A − lpr(p, d)/d)/p` with `1 <= A <= d − 2` if `p ≡ −1 mod d`,
/// else `1 <= A <= d − 3`.
pub fn almost_cy_candidates(n: usize, d: u64, p: u64) -> Result<Vec<Candidate>> {
    check_prime(p)?;
    if d < 2 {
        return Err(FptError::pre(format!("d = {d} must be at least 2")));
    }
    if (p as i128) <= (n as i128 - 2) * d as i128 {
        return Err(FptError::pre(format!(
            "need p > (n − 2)·d, got p = {p}, n = {n}, d = {d}"
        )));
    }
    if d.is_multiple_of(p) {
        return Err(FptError::pre(format!("p = {p} divides d = {d}")));
    }
    let lambda = rat(d as i64 - 1, d as i64);
    let r = lpr_unchecked(&BigInt::from(p), &BigInt::from(d));
    let mut pool = Pool::default();
    if p % d == 1 % d {
        pool.add(lambda.clone(), Provenance::Lambda);
    }
    let a_max = if (p + 1).is_multiple_of(d) {
        d - 2
    } else {
        d.saturating_sub(3)
    };
    let pd = BigInt::from(p * d);
    for big_a in 1..=a_max {
        let shift = Rational::new(BigInt::from(big_a) * BigInt::from(d) - &r, pd.clone());
        pool.add(&lambda - shift, Provenance::Pair { l: 1, e: big_a - 1 });
    }
    Ok(pool.finish())
}

/// True iff `Σw > deg f` and `p > (n − 3)/(ρ − 1)` with `ρ = Σw / deg f`.
pub fn secondary_theorem_applies(n: usize, weights: &[u64], deg_f: u64, p: u64) -> bool {
    let total: u64 = weights.iter().sum();
    if total <= deg_f {
        return false;
    }
    // p > (n−3)·deg / (Σw − deg)
    (p as i128) * (total - deg_f) as i128 > (n as i128 - 3) * deg_f as i128
}

/// Size data for the finite set containing all thresholds above `μ` of
/// quasi-homogeneous isolated singularities with weights at most `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccSuperset {
    /// Largest denominator `b` of an admissible `λ`.
    pub b_max: u64,
    pub m_max: u64,
    /// `#{a / p^M_max} ∩ (μ, 1]`.
    pub power_part: BigInt,
    /// `#{a/b : b <= b_max, p ∤ b} ∩ (μ, 1]`.
    pub rational_part: u64,
    /// Size of the union of both parts.
    pub total: BigInt,
}

pub fn acc_superset(n: usize, weight_cap: u64, mu_bound: &Rational, p: u64) -> Result<AccSuperset> {
    check_prime(p)?;
    if !mu_bound.is_positive() || *mu_bound > Rational::one() {
        return Err(FptError::pre(format!("μ = {mu_bound} must lie in (0, 1]")));
    }
    if n < 2 || weight_cap == 0 {
        return Err(FptError::pre("need n >= 2 and a positive weight cap"));
    }
    let b_max = (Rational::from_integer(BigInt::from(n as u64 * weight_cap)) / mu_bound)
        .floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| FptError::Capacity("denominator bound exceeds 64 bits".into()))?;
    let mut m_max = 0;
    let mut rational_part = 0u64;
    let mut one_in_s = false;
    for b in (1..=b_max).filter(|b| b % p != 0) {
        m_max = m_max.max(uniform_l_bound(n, b)?);
        for a in 1..=b {
            if a.gcd(&b) == 1 && rat(a as i64, b as i64) > *mu_bound {
                rational_part += 1;
                one_in_s |= a == b;
            }
        }
    }
    let pm = BigInt::from(p).pow(m_max as u32);
    let floor = (mu_bound * Rational::from_integer(pm.clone()))
        .floor()
        .to_integer();
    let power_part = &pm - floor;
    // The two parts can only share the value 1.
    let overlap = u64::from(one_in_s && power_part.is_positive());
    let total = &power_part + BigInt::from(rational_part) - BigInt::from(overlap);
    Ok(AccSuperset {
        b_max,
        m_max,
        power_part,
        rational_part,
        total,
    })
}

/// Plain-text table: value, L, E, provenance, filters.
pub fn format_candidate_table(cands: &[Candidate]) -> String {
    let mut rows = vec![[
        "value".to_string(),
        "L".into(),
        "E".into(),
        "provenance".into(),
        "filters".into(),
    ]];
    for c in cands {
        let (l, e) = match c
            .provenance
            .iter()
            .find(|p| matches!(p, Provenance::Pair { .. }))
        {
            Some(Provenance::Pair { l, e }) if !c.is_lambda() => (l.to_string(), e.to_string()),
            _ => ("inf".to_string(), "-".to_string()),
        };
        let prov: Vec<String> = c.provenance.iter().map(ToString::to_string).collect();
        let filters: Vec<String> = c.filters_passed.iter().map(ToString::to_string).collect();
        rows.push([
            to_fraction_string(&c.value),
            l,
            e,
            prov.join(" "),
            if filters.is_empty() {
                "-".into()
            } else {
                filters.join(",")
            },
        ]);
    }
    let widths: Vec<usize> = (0..5)
        .map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &rows {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
