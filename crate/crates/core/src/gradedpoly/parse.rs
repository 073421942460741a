//! Text grammar: `term ((+|-) term)*`, where a term is a `*`-separated
//! product of integers and `var[^exp]` factors. Variables are `x`, `y`, `z`
//! when `n <= 3` and `x1 .. xn` otherwise.

use super::Polynomial;
use crate::error::{FptError, Result};

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        text.parse()
            .map_err(|_| self.error(start, "expected a non-negative integer"))
    }

    fn error(&self, at: usize, what: &str) -> FptError {
        FptError::Parse(format!("{what} at offset {at}"))
    }
}

fn variable(lex: &mut Lexer<'_>, nvars: usize) -> Result<usize> {
    let start = lex.pos;
    let c = lex
        .bump()
        .ok_or_else(|| lex.error(start, "expected a variable"))?;
    if nvars <= 3 {
        let idx = match c {
            b'x' => 0,
            b'y' => 1,
            b'z' => 2,
            _ => return Err(lex.error(start, "expected one of x, y, z")),
        };
        if idx >= nvars {
            return Err(lex.error(start, &format!("variable out of range for n = {nvars}")));
        }
        // Reject indexed names here so `x1` is not silently read as `x * 1`.
        if lex
            .s
            .get(lex.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric())
        {
            return Err(lex.error(start, "unexpected character after variable"));
        }
        Ok(idx)
    } else {
        if c != b'x' || !lex.s.get(lex.pos).is_some_and(u8::is_ascii_digit) {
            return Err(lex.error(start, "expected an indexed variable x1 .. xn"));
        }
        let i = lex.number()? as usize;
        if i == 0 || i > nvars {
            return Err(lex.error(
                start,
                &format!("variable index out of range for n = {nvars}"),
            ));
        }
        Ok(i - 1)
    }
}

pub(super) fn parse_polynomial(text: &str, prime: u64, nvars: usize) -> Result<Polynomial> {
    let mut out = Polynomial::zero(prime, nvars)?;
    let mut lex = Lexer {
        s: text.as_bytes(),
        pos: 0,
    };
    if lex.peek().is_none() {
        return Err(FptError::Parse("empty polynomial".into()));
    }
    let mut negative = false;
    if lex.peek() == Some(b'-') {
        lex.bump();
        negative = true;
    } else if lex.peek() == Some(b'+') {
        lex.bump();
    }
    loop {
        let mut exps = vec![0u64; nvars];
        let mut coeff = 1u64;
        loop {
            match lex.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let k = lex.number()? % prime;
                    coeff = coeff * k % prime;
                }
                Some(_) => {
                    let i = variable(&mut lex, nvars)?;
                    let mut e = 1;
                    if lex.peek() == Some(b'^') {
                        lex.bump();
                        e = lex.number()?;
                    }
                    exps[i] = exps[i]
                        .checked_add(e)
                        .ok_or_else(|| FptError::Parse("exponent overflow".into()))?;
                }
                None => return Err(lex.error(lex.pos, "expected a factor")),
            }
            if lex.peek() == Some(b'*') {
                lex.bump();
            } else {
                break;
            }
        }
        if negative {
            coeff = (prime - coeff) % prime;
        }
        out.add_term(super::Monomial::new(exps), coeff);
        match lex.peek() {
            None => break,
            Some(b'+') => negative = false,
            Some(b'-') => negative = true,
            Some(_) => return Err(lex.error(lex.pos, "expected + or -")),
        }
        lex.bump();
    }
    Ok(out)
}
