//! Polynomial strings in the group-spec grammar:
//!
//! ```text
//! poly   := sign? term (("+" | "-") term)*
//! term   := factor ("*" factor)*
//! factor := int ("/" uint)? | var ("^" uint)?
//! ```
//!
//! Whitespace is ignored. Parsing is two-phase: [`PolyExpr::parse`] yields
//! rational coefficients so the caller can pick the localized base `N`
//! before [`PolyExpr::lower`] builds a [`RingElement`].

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::{Monomial, RingCtx, RingElement};
use super::scalar::NLocInt;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
struct Term {
    num: BigInt,
    den: BigUint,
    vars: Vec<(String, u32)>,
}

/// Parsed but not yet lowered polynomial.
#[derive(Clone, Debug)]
pub struct PolyExpr {
    terms: Vec<Term>,
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { s: src.as_bytes(), pos: 0, src }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn uint(&mut self) -> Result<BigUint> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(self.src[start..self.pos].parse().expect("digits parse"))
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len()
            && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected identifier"));
        }
        Ok(self.src[start..self.pos].to_string())
    }
}

impl PolyExpr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut lx = Lexer::new(src);
        let mut terms = Vec::new();
        let mut negative = if lx.eat(b'-') {
            true
        } else {
            lx.eat(b'+');
            false
        };
        loop {
            let mut term = Self::term(&mut lx)?;
            if negative {
                term.num = -term.num;
            }
            terms.push(term);
            match lx.peek() {
                None => break,
                Some(b'+') => {
                    lx.pos += 1;
                    negative = false;
                }
                Some(b'-') => {
                    lx.pos += 1;
                    negative = true;
                }
                Some(_) => return Err(lx.err("unexpected character")),
            }
        }
        Ok(PolyExpr { terms })
    }

    fn term(lx: &mut Lexer<'_>) -> Result<Term> {
        let mut term = Term { num: BigInt::one(), den: BigUint::one(), vars: Vec::new() };
        loop {
            match lx.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let a = lx.uint()?;
                    term.num *= BigInt::from(a);
                    if lx.eat(b'/') {
                        let d = lx.uint()?;
                        if d.is_zero() {
                            return Err(lx.err("zero denominator"));
                        }
                        term.den *= d;
                    }
                }
                Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                    let name = lx.ident()?;
                    let e = if lx.eat(b'^') {
                        u32::try_from(lx.uint()?).map_err(|_| lx.err("exponent too large"))?
                    } else {
                        1
                    };
                    term.vars.push((name, e));
                }
                _ => return Err(lx.err("expected coefficient or variable")),
            }
            if !lx.eat(b'*') {
                return Ok(term);
            }
        }
    }

    /// Every denominator appearing in the expression.
    pub fn denominators(&self) -> impl Iterator<Item = &BigUint> {
        self.terms.iter().map(|t| &t.den).filter(|d| !d.is_one())
    }

    /// Builds the ring element. Each denominator must divide a power of `N`.
    pub fn lower(&self, ctx: &RingCtx) -> Result<RingElement> {
        let n = ctx.n();
        let mut out = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let mut mono: Monomial = vec![0; ctx.t()];
            for (name, e) in &t.vars {
                if name == "x" {
                    return Err(Error::ReservedName(name.clone()));
                }
                let i = ctx
                    .vars()
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
                mono[i] += e;
            }
            let (k, scale) = power_clearing(&t.den, n).ok_or_else(|| {
                Error::Parse(format!("denominator {} is not a divisor of a power of N = {n}", t.den))
            })?;
            let num = &t.num * BigInt::from(scale);
            out.push((mono, NLocInt::canonical(num, k, n)));
        }
        Ok(RingElement::from_terms(n, ctx.t(), out))
    }
}

/// Smallest `k` with `den | N^k`, and the cofactor `N^k / den`.
fn power_clearing(den: &BigUint, n: u64) -> Option<(u32, BigUint)> {
    let base = BigUint::from(n);
    let mut pow = BigUint::one();
    for k in 0..=256u32 {
        let (q, r) = pow.div_rem(den);
        if r.is_zero() {
            return Some((k, q));
        }
        pow *= &base;
    }
    None
}

/// Parses and lowers in one step.
pub fn parse_poly(src: &str, ctx: &RingCtx) -> Result<RingElement> {
    PolyExpr::parse(src)?.lower(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx1() -> RingCtx {
        RingCtx::with_vars(2, 1).unwrap()
    }

    #[test]
    fn parses_grammar() {
        let c = RingCtx::with_vars(2, 2).unwrap();
        let r = parse_poly("x1^2 - 1", &c).unwrap();
        assert_eq!(r, &c.var(0).pow(2) - &c.one());
        let r = parse_poly("3/2*x1^2", &c).unwrap();
        assert_eq!(r.to_string_with(c.vars()), "3/2*x1^2");
        let r = parse_poly("x1 + 4*x2", &c).unwrap();
        assert_eq!(r.support_len(), 2);
        let r = parse_poly("-x1*x2 + 2", &c).unwrap();
        assert_eq!(r.to_string_with(c.vars()), "-x1*x2+2");
        assert!(parse_poly("0", &c).unwrap().is_zero());
    }

    #[test]
    fn rejects_malformed() {
        let c = ctx1();
        for bad in ["", "x1 +", "1/0", "2 ** x1", "x1^", "y", "x", "1/3"] {
            assert!(parse_poly(bad, &c).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn composite_base_denominators() {
        let c = RingCtx::with_vars(6, 0).unwrap();
        // 1/4 divides 6^2: 1/4 = 9/36
        let r = parse_poly("1/4", &c).unwrap();
        let k = r.as_constant().unwrap();
        assert_eq!((k.numerator().clone(), k.exponent()), (BigInt::from(9), 2));
    }

    #[test]
    fn round_trip_through_rendering() {
        let c = RingCtx::with_vars(2, 2).unwrap();
        for s in ["1+2*x1", "3/4*x1^3*x2-x2+7", "-1", "x1^2-1"] {
            let r = parse_poly(s, &c).unwrap();
            let again = parse_poly(&r.to_string_with(c.vars()), &c).unwrap();
            assert_eq!(r, again, "{s}");
        }
    }
}
