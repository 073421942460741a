//! Packed representation of truncated powers `f^N mod m^[e]`.
//!
//! Exponent vectors are packed into one `u128` key, first variable in the
//! most significant field, so integer order is lexicographic order and
//! monomial multiplication is integer addition. When `f` is homogeneous
//! only the first `n − 1` exponents are stored; the last one is implied by
//! the total degree `N·deg f`. Each field carries one spare high bit so a
//! single mask test detects any exponent `>= p^e`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{FptError, Result};
use crate::gradedpoly::{GradedPolynomial, Polynomial};

/// Default cap on the number of terms of a truncated power.
pub const DEFAULT_TERM_BUDGET: usize = 8_000_000;

#[derive(Debug, Clone)]
struct Implied {
    /// Weights of the stored variables.
    weights: Vec<u64>,
    last_weight: u64,
    degree: u64,
}

/// `f` together with the packing scheme shared by all its powers.
#[derive(Debug, Clone)]
pub(crate) struct Engine {
    prime: u64,
    nvars: usize,
    nfields: usize,
    implied: Option<Implied>,
    f_terms: Vec<(Vec<u64>, u32)>,
    max_f_exp: u64,
    term_budget: usize,
}

/// Field geometry at one level `e`.
#[derive(Debug, Clone, Copy)]
struct Layout {
    bits: u32,
    q: u64,
    /// Adds `2^(bits−1) − q` to every field.
    offset: u128,
    /// Spare high bit of every field.
    high: u128,
}

/// Nonzero truncated power, sorted by key.
#[derive(Debug, Clone)]
pub(crate) struct Slice {
    pub level: u32,
    pub power: u128,
    bits: u32,
    keys: Vec<u128>,
    coeffs: Vec<u32>,
}

fn bit_length(x: u128) -> u32 {
    128 - x.leading_zeros()
}

impl Engine {
    pub fn from_polynomial(f: &Polynomial) -> Result<Self> {
        Engine::build(f, None)
    }

    pub fn from_graded(f: &GradedPolynomial) -> Result<Self> {
        Engine::build(f.poly(), Some(f))
    }

    fn build(f: &Polynomial, graded: Option<&GradedPolynomial>) -> Result<Self> {
        if f.is_zero() || f.has_constant_term() {
            return Err(FptError::NotInMaximalIdeal);
        }
        let n = f.nvars();
        let implied = match graded {
            Some(g) if n >= 2 => {
                let w = g.grading().weights();
                Some(Implied {
                    weights: w[..n - 1].to_vec(),
                    last_weight: w[n - 1],
                    degree: g.degree(),
                })
            }
            _ => None,
        };
        let nfields = if implied.is_some() { n - 1 } else { n };
        let f_terms = f
            .terms()
            .map(|(m, c)| (m.exponents()[..nfields].to_vec(), c as u32))
            .collect::<Vec<_>>();
        Ok(Engine {
            prime: f.prime(),
            nvars: n,
            nfields,
            implied,
            f_terms,
            max_f_exp: f.max_exponent(),
            term_budget: DEFAULT_TERM_BUDGET,
        })
    }

    pub fn with_term_budget(mut self, budget: usize) -> Self {
        self.term_budget = budget;
        self
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    fn layout(&self, e: u32) -> Result<Layout> {
        let q = self
            .prime
            .checked_pow(e)
            .ok_or_else(|| FptError::Capacity(format!("p^{e} exceeds 64 bits")))?;
        let bits = bit_length(q as u128 + self.max_f_exp as u128) + 1;
        if bits as usize * self.nfields > 128 {
            return Err(FptError::Capacity(format!(
                "{} exponent fields of {bits} bits do not fit in a 128-bit key",
                self.nfields
            )));
        }
        let mut offset = 0u128;
        let mut high = 0u128;
        for i in 0..self.nfields as u32 {
            offset |= ((1u128 << (bits - 1)) - q as u128) << (i * bits);
            high |= (1u128 << (bits - 1)) << (i * bits);
        }
        Ok(Layout {
            bits,
            q,
            offset,
            high,
        })
    }

    fn pack(&self, exps: &[u64], bits: u32) -> u128 {
        exps[..self.nfields]
            .iter()
            .fold(0u128, |acc, &a| (acc << bits) | a as u128)
    }

    fn unpack(&self, key: u128, bits: u32) -> Vec<u64> {
        let mask = (1u128 << bits) - 1;
        let mut out = vec![0u64; self.nfields];
        let mut k = key;
        for slot in out.iter_mut().rev() {
            *slot = (k & mask) as u64;
            k >>= bits;
        }
        out
    }

    /// `Σ a_i w_i` over stored fields.
    fn stored_weight(&self, key: u128, bits: u32, weights: &[u64]) -> u128 {
        let mask = (1u128 << bits) - 1;
        let mut k = key;
        let mut s = 0u128;
        for &w in weights.iter().rev() {
            s += (k & mask) * w as u128;
            k >>= bits;
        }
        s
    }

    /// The truncated power `f^0 = 1` at level 0.
    pub fn level_zero(&self) -> Slice {
        Slice {
            level: 0,
            power: 0,
            bits: 1,
            keys: vec![0],
            coeffs: vec![1],
        }
    }

    /// `h^p`, repacked for level `e + 1`.
    pub fn twist(&self, h: &Slice) -> Result<Slice> {
        let layout = self.layout(h.level + 1)?;
        let p = self.prime;
        let keys = h
            .keys
            .iter()
            .map(|&k| {
                let exps: Vec<u64> = self.unpack(k, h.bits).into_iter().map(|a| a * p).collect();
                self.pack(&exps, layout.bits)
            })
            .collect();
        Ok(Slice {
            level: h.level + 1,
            power: h.power * p as u128,
            bits: layout.bits,
            keys,
            coeffs: h.coeffs.clone(),
        })
    }

    /// `h · f mod m^[e]`; the result may be empty.
    pub fn mul_f(&self, h: &Slice) -> Result<Slice> {
        let layout = self.layout(h.level)?;
        debug_assert_eq!(layout.bits, h.bits);
        let p = self.prime;
        let power = h.power + 1;
        // Stored weight must exceed this for the implied exponent to be < q.
        let implied_floor = self.implied.as_ref().map(|im| {
            (power * im.degree as u128).checked_sub(layout.q as u128 * im.last_weight as u128)
        });
        let streams: Vec<(u128, u64)> = self
            .f_terms
            .iter()
            .map(|(e, c)| (self.pack(e, layout.bits), *c as u64))
            .collect();
        let ok = |key: u128| -> bool {
            if (key + layout.offset) & layout.high != 0 {
                return false;
            }
            match (&self.implied, implied_floor) {
                (Some(im), Some(Some(floor))) => {
                    self.stored_weight(key, layout.bits, &im.weights) > floor
                }
                _ => true,
            }
        };
        let advance = |j: usize, mut idx: usize| -> Option<(u128, usize)> {
            while idx < h.keys.len() {
                let k = h.keys[idx] + streams[j].0;
                if ok(k) {
                    return Some((k, idx));
                }
                idx += 1;
            }
            None
        };
        let mut heap = BinaryHeap::with_capacity(streams.len());
        for j in 0..streams.len() {
            if let Some((k, idx)) = advance(j, 0) {
                heap.push(Reverse((k, j, idx)));
            }
        }
        let mut keys: Vec<u128> = Vec::with_capacity(h.keys.len());
        let mut coeffs: Vec<u32> = Vec::with_capacity(h.keys.len());
        let mut cur: Option<(u128, u64)> = None;
        while let Some(Reverse((k, j, idx))) = heap.pop() {
            let c = h.coeffs[idx] as u64 * streams[j].1 % p;
            cur = match cur {
                Some((ck, cc)) if ck == k => Some((ck, (cc + c) % p)),
                Some((ck, cc)) => {
                    if cc != 0 {
                        keys.push(ck);
                        coeffs.push(cc as u32);
                    }
                    Some((k, c))
                }
                None => Some((k, c)),
            };
            if let Some(next) = advance(j, idx + 1) {
                heap.push(Reverse((next.0, j, next.1)));
            }
        }
        if let Some((ck, cc)) = cur {
            if cc != 0 {
                keys.push(ck);
                coeffs.push(cc as u32);
            }
        }
        if keys.len() > self.term_budget {
            return Err(FptError::Capacity(format!(
                "truncated power has {} terms, above the budget of {}",
                keys.len(),
                self.term_budget
            )));
        }
        Ok(Slice {
            level: h.level,
            power,
            bits: h.bits,
            keys,
            coeffs,
        })
    }

    /// Expands a slice into an ordinary polynomial.
    pub fn to_polynomial(&self, h: &Slice) -> Result<Polynomial> {
        let terms = h
            .keys
            .iter()
            .zip(&h.coeffs)
            .map(|(&k, &c)| {
                let mut exps = self.unpack(k, h.bits);
                if let Some(im) = &self.implied {
                    let total = h.power * im.degree as u128;
                    let stored = self.stored_weight(k, h.bits, &im.weights);
                    let rest = total
                        .checked_sub(stored)
                        .filter(|r| r % im.last_weight as u128 == 0)
                        .ok_or_else(|| {
                            FptError::InvariantViolation("inconsistent packed degree".into())
                        })?;
                    exps.push((rest / im.last_weight as u128) as u64);
                }
                Ok((exps, c as i64))
            })
            .collect::<Result<Vec<_>>>()?;
        Polynomial::from_terms(self.prime, self.nvars, terms)
    }
}

impl Slice {
    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }
}
