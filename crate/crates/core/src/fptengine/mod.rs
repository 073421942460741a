//! The sequence `ν_e = max{N : f^N ∉ m^[e]}` and the F-pure threshold.
//!
//! `ν_(e+1) = p·ν_e + d` with `0 <= d <= p − 1`: raising a witness of
//! `f^(ν_e) ∉ m^[e]` to the `p`-th power is free in characteristic `p`, and
//! `d` is found by multiplying by `f` until the product lands in `m^[e+1]`.

mod slice;

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::basep::{scaled_truncation_unchecked, split_prime_power, truncation_unchecked, Depth};
use crate::candidates::{
    digit_minimality_filter_exhaustive, first_difference_filter, lambda_of, lambda_parts,
    main_candidates, secondary_theorem_applies, two_variable_candidates, Candidate, Provenance,
};
use crate::error::{FptError, Result};
use crate::gradedpoly::{
    check_homogeneous, has_isolated_singularity, weighted_degree, GradedPolynomial, Grading,
    Polynomial,
};
use crate::rational::Rational;

pub use slice::DEFAULT_TERM_BUDGET;
use slice::{Engine, Slice};

/// `ν_e` together with `f^(ν_e) mod m^[e]`.
#[derive(Debug, Clone)]
pub struct NuRecord {
    slice: Slice,
    engine: Arc<Engine>,
}

impl NuRecord {
    pub fn e(&self) -> u32 {
        self.slice.level
    }

    pub fn nu(&self) -> u128 {
        self.slice.power
    }

    pub fn prime(&self) -> u64 {
        self.engine.prime()
    }

    /// Number of terms of the stored truncated power.
    pub fn support_size(&self) -> usize {
        self.slice.len()
    }

    /// `f^(ν_e)` reduced modulo `m^[e]`; never zero.
    pub fn reduced_power(&self) -> Result<Polynomial> {
        self.engine.to_polynomial(&self.slice)
    }
}

/// Engine for `f`, using the projection onto `n − 1` exponents whenever `f`
/// is homogeneous for the standard grading.
fn engine_for(f: &Polynomial) -> Result<Engine> {
    match check_homogeneous(f, &Grading::standard(f.nvars())) {
        Ok(g) => Engine::from_graded(&g),
        Err(FptError::Inhomogeneous { .. }) => Engine::from_polynomial(f),
        Err(e) => Err(e),
    }
}

fn step(engine: &Arc<Engine>, prev: &Slice) -> Result<NuRecord> {
    let p = engine.prime();
    let mut h = engine.twist(prev)?;
    let mut d = 0;
    loop {
        let next = engine.mul_f(&h)?;
        if next.is_empty() {
            break;
        }
        h = next;
        d += 1;
        if d == p {
            return Err(FptError::InvariantViolation(format!(
                "f^(p·ν + p) ∉ m^[{}], impossible in characteristic {p}",
                h.level
            )));
        }
    }
    Ok(NuRecord {
        slice: h,
        engine: Arc::clone(engine),
    })
}

/// `ν_1`.
pub fn nu_first(f: &Polynomial) -> Result<NuRecord> {
    let engine = Arc::new(engine_for(f)?);
    step(&engine, &engine.level_zero())
}

/// `ν_1` for a graded polynomial, stored in its weighted projection.
pub fn nu_first_graded(f: &GradedPolynomial) -> Result<NuRecord> {
    let engine = Arc::new(Engine::from_graded(f)?);
    step(&engine, &engine.level_zero())
}

pub fn nu_next(prev: &NuRecord) -> Result<NuRecord> {
    step(&prev.engine, &prev.slice)
}

fn sequence_from(first: Result<NuRecord>, e_max: u32) -> Result<Vec<NuRecord>> {
    let mut out = Vec::with_capacity(e_max as usize);
    if e_max == 0 {
        return Ok(out);
    }
    out.push(first?);
    while out.len() < e_max as usize {
        let next = nu_next(out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

/// `ν_1, ..., ν_(e_max)`.
pub fn nu_sequence(f: &Polynomial, e_max: u32) -> Result<Vec<NuRecord>> {
    sequence_from(nu_first(f), e_max)
}

pub fn nu_sequence_graded(f: &GradedPolynomial, e_max: u32) -> Result<Vec<NuRecord>> {
    sequence_from(nu_first_graded(f), e_max)
}

/// `ν_e / p^e`.
pub fn fpt_lower_bound(rec: &NuRecord) -> Rational {
    Rational::new(
        BigInt::from(rec.nu()),
        BigInt::from(rec.prime()).pow(rec.e()),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FptOptions {
    /// Deepest level `e` computed before giving up.
    pub e_cap: u32,
    /// Largest admissible support of a truncated power.
    pub term_budget: usize,
}

impl Default for FptOptions {
    fn default() -> Self {
        FptOptions {
            e_cap: 12,
            term_budget: DEFAULT_TERM_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UndeterminedReason {
    /// `p` divides the denominator of `λ`.
    PrimeDividesDenominator,
    /// Several candidates agree with `ν_1, ..., ν_(e_cap)`.
    LevelCap,
    /// A truncated power outgrew the term budget or the key width.
    Capacity(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Exact {
        value: Rational,
        /// `Lambda`, or every `(L, E)` with `value = <λ>_L − E/p^L`.
        certificate: Vec<Provenance>,
    },
    Undetermined {
        survivors: Vec<Candidate>,
        lower_bound: Rational,
        levels_computed: u32,
        reason: UndeterminedReason,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FptResult {
    pub prime: u64,
    pub lambda: Rational,
    pub verdict: Verdict,
    /// `ν_1, ν_2, ...` as computed (empty when no powering was needed).
    pub nu: Vec<u128>,
}

impl FptResult {
    pub fn exact_value(&self) -> Option<&Rational> {
        match &self.verdict {
            Verdict::Exact { value, .. } => Some(value),
            Verdict::Undetermined { .. } => None,
        }
    }
}

/// Candidate list used by [`fpt_exact`] for `p ∤ b`, after the digit filters.
pub fn filtered_candidates(n: usize, lambda: &Rational, p: u64) -> Result<Vec<Candidate>> {
    let (a, b) = lambda_parts(lambda)?;
    let raw = if n == 2 {
        two_variable_candidates(a, b, p)?
    } else {
        main_candidates(n, a, b, p)?
    };
    let cands = digit_minimality_filter_exhaustive(raw, p)?;
    first_difference_filter(cands, lambda, p)
}

fn lower_bound_of(nu: &[u128], p: u64) -> Rational {
    match nu.last() {
        Some(&v) => Rational::new(BigInt::from(v), BigInt::from(p).pow(nu.len() as u32)),
        None => Rational::zero(),
    }
}

/// Exact F-pure threshold of a quasi-homogeneous `f` with `√J(f) = m`,
/// by eliminating candidates against `ν_e = p^e <fpt>_e`.
pub fn fpt_exact(f: &GradedPolynomial, opts: &FptOptions) -> Result<FptResult> {
    if !has_isolated_singularity(f) {
        return Err(FptError::pre(format!(
            "{f} does not have an isolated singularity at the origin"
        )));
    }
    let p = f.prime();
    let n = f.nvars();
    let lambda = lambda_of(f.grading(), f.degree())?;
    if secondary_theorem_applies(n, f.grading().weights(), f.degree(), p) {
        return Ok(FptResult {
            prime: p,
            lambda,
            verdict: Verdict::Exact {
                value: Rational::one(),
                certificate: vec![Provenance::Lambda],
            },
            nu: Vec::new(),
        });
    }
    let (_, b) = lambda_parts(&lambda)?;
    let engine = Arc::new(Engine::from_graded(f)?.with_term_budget(opts.term_budget));
    let mut nu = Vec::new();
    let mut slice = engine.level_zero();

    let mut survivors = if b % p == 0 {
        Vec::new()
    } else {
        filtered_candidates(n, &lambda, p)?
    };
    let undetermined = |survivors: Vec<Candidate>, nu: Vec<u128>, reason| FptResult {
        prime: p,
        lambda: lambda.clone(),
        verdict: Verdict::Undetermined {
            survivors,
            lower_bound: lower_bound_of(&nu, p),
            levels_computed: nu.len() as u32,
            reason,
        },
        nu,
    };

    for e in 1..=opts.e_cap {
        let rec = match step(&engine, &slice) {
            Ok(r) => r,
            Err(FptError::Capacity(msg)) => {
                let reason = if b % p == 0 {
                    UndeterminedReason::PrimeDividesDenominator
                } else {
                    UndeterminedReason::Capacity(msg)
                };
                return Ok(undetermined(survivors, nu, reason));
            }
            Err(err) => return Err(err),
        };
        let nu_e = rec.nu();
        nu.push(nu_e);
        slice = rec.slice;
        if b % p == 0 {
            continue;
        }
        let target = BigInt::from(nu_e);
        survivors.retain(|c| scaled_truncation_unchecked(&c.value, p, e as u64) == target);
        match survivors.as_slice() {
            [] => {
                return Err(FptError::InvariantViolation(format!(
                    "no candidate matches ν_{e} = {nu_e} for {f} at p = {p}"
                )))
            }
            [only] if only.is_lambda() || only.min_l().is_some_and(|l| e as u64 >= l) => {
                let c = survivors.pop().expect("one survivor");
                return Ok(FptResult {
                    prime: p,
                    lambda: lambda.clone(),
                    verdict: Verdict::Exact {
                        value: c.value,
                        certificate: c.provenance,
                    },
                    nu,
                });
            }
            _ => {}
        }
    }
    let reason = if b % p == 0 {
        UndeterminedReason::PrimeDividesDenominator
    } else {
        UndeterminedReason::LevelCap
    };
    Ok(undetermined(survivors, nu, reason))
}

/// Outcome of comparing `ν_e` with `p^e <fpt>_e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    /// Smallest `e` where the identity fails.
    pub first_failure: Option<u32>,
    pub nu: Vec<u128>,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks `ν_e = p^e <fpt>_e` for `1 <= e <= e_max`.
pub fn verify_truncation_identity(
    f: &Polynomial,
    fpt: &Rational,
    e_max: u32,
) -> Result<IdentityCheck> {
    if !crate::rational::in_unit_interval(fpt) {
        return Err(FptError::pre(format!("{fpt} is not in (0, 1]")));
    }
    let p = f.prime();
    let mut nu = Vec::new();
    let mut rec: Option<NuRecord> = None;
    for e in 1..=e_max {
        let next = match &rec {
            None => nu_first(f)?,
            Some(r) => nu_next(r)?,
        };
        nu.push(next.nu());
        if scaled_truncation_unchecked(fpt, p, e as u64) != BigInt::from(next.nu()) {
            return Ok(IdentityCheck {
                first_failure: Some(e),
                nu,
            });
        }
        rec = Some(next);
    }
    Ok(IdentityCheck {
        first_failure: None,
        nu,
    })
}

/// True iff `f^N ∈ m^[e]`, by square-and-multiply in `R / m^[e]`.
pub fn membership_test(f: &Polynomial, big_n: &BigUint, e: u32) -> Result<bool> {
    if e == 0 {
        return Err(FptError::pre(
            "membership in m^[0] = R is trivial; e must be positive",
        ));
    }
    let mut acc = Polynomial::constant(f.prime(), f.nvars(), 1)?;
    let base = f.reduce_mod_frobenius(e);
    for i in (0..big_n.bits()).rev() {
        acc = acc.mul_mod_frobenius(&acc, e)?;
        if big_n.bit(i) {
            acc = acc.mul_mod_frobenius(&base, e)?;
        }
        if acc.is_zero() {
            return Ok(true);
        }
    }
    Ok(acc.is_zero())
}

/// Which sufficient conditions for `fpt(f + g) = fpt(f)` hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constancy {
    /// `deg g >= n·deg f − Σw + 1` and `deg f >= Σw`.
    pub high_degree: bool,
    /// `fpt(f) = λ`.
    pub equals_lambda: bool,
    /// `fpt(f) = <λ>_L` with `(p^L − 1)·λ` integral.
    pub integral_truncation: bool,
}

impl Constancy {
    pub fn guaranteed(&self) -> bool {
        self.high_degree || self.equals_lambda || self.integral_truncation
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationReport {
    pub fpt_f: Rational,
    pub certificate: Vec<Provenance>,
    /// `fpt(f) <= fpt(f + g)`; holds whenever every term of `g` has degree
    /// above `deg f`.
    pub lower_ok: bool,
    /// `Some(true)` iff `(f + g)^(p^L·fpt(f)) ∈ m^[L]`, i.e. `fpt(f + g) <= fpt(f)`;
    /// `None` when `fpt(f)` is not of the form `k / p^L`.
    pub upper_ok: Option<bool>,
    /// The membership check failed, so `fpt(f + g) > fpt(f)`.
    pub strict_increase: bool,
    pub constancy: Constancy,
    /// Smallest degree `n·deg f − Σw + 1` from which every perturbation
    /// leaves the threshold unchanged (when `deg f >= Σw`).
    pub min_perturbation_degree: i64,
    pub min_degree_of_g: u64,
}

pub fn perturbation_report(
    f: &GradedPolynomial,
    g: &Polynomial,
    opts: &FptOptions,
) -> Result<PerturbationReport> {
    f.poly().check_compatible(g)?;
    if g.is_zero() {
        return Err(FptError::pre("perturbation g must be nonzero"));
    }
    let mut min_deg = u64::MAX;
    for (m, _) in g.terms() {
        let d = weighted_degree(m, f.grading())?;
        if d <= f.degree() {
            return Err(FptError::pre(format!(
                "term of g has degree {d}, not above deg f = {}",
                f.degree()
            )));
        }
        min_deg = min_deg.min(d);
    }
    let res = fpt_exact(f, opts)?;
    let (v, certificate) = match res.verdict {
        Verdict::Exact { value, certificate } => (value, certificate),
        Verdict::Undetermined { .. } => {
            return Err(FptError::pre(format!(
                "fpt of {f} at p = {} is not determined",
                f.prime()
            )))
        }
    };
    let p = f.prime();
    let lambda = res.lambda;
    let upper_ok = if v.is_one() {
        Some(true)
    } else {
        let (l, cofactor) = split_prime_power(v.denom(), p);
        if cofactor.is_one() {
            let big_n = v.numer().to_biguint().expect("positive");
            Some(membership_test(&(f.poly() + g), &big_n, l as u32)?)
        } else {
            None
        }
    };
    let sum_w = f.grading().total();
    let n = f.nvars() as i64;
    let min_perturbation_degree = n * f.degree() as i64 - sum_w as i64 + 1;
    let high_degree = min_deg as i64 >= min_perturbation_degree && f.degree() >= sum_w;
    let integral_truncation = certificate.iter().any(|prov| match prov {
        Provenance::Pair { l, e: 0 } => {
            let pl = BigInt::from(p).pow(*l as u32);
            let scaled = (Rational::from_integer(pl - 1u32)) * &lambda;
            scaled.is_integer() && truncation_unchecked(&lambda, p, Depth::Finite(*l)) == v
        }
        _ => false,
    });
    Ok(PerturbationReport {
        fpt_f: v.clone(),
        certificate,
        lower_ok: true,
        upper_ok,
        strict_increase: upper_ok == Some(false),
        constancy: Constancy {
            high_degree,
            equals_lambda: v == lambda,
            integral_truncation,
        },
        min_perturbation_degree,
        min_degree_of_g: min_deg,
    })
}
