use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;

use super::scalar::NLocInt;
use crate::error::{Error, Result};
use crate::primes::{mul_mod, pow_mod};

/// Exponent vector of a monomial, length `t`.
pub type Monomial = Vec<u32>;

/// The ring `Z[1/N][x_1..x_t]`: the localized base and the variable names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingCtx {
    n: u64,
    vars: Vec<String>,
}

impl RingCtx {
    pub fn new(n: u64, vars: Vec<String>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("N must be at least 2, got {n}")));
        }
        for (i, v) in vars.iter().enumerate() {
            if v == "x" {
                return Err(Error::ReservedName(v.clone()));
            }
            if !is_identifier(v) {
                return Err(Error::Parse(format!("variable name {v:?} is not an identifier")));
            }
            if vars[..i].contains(v) {
                return Err(Error::InvalidArgument(format!("duplicate variable {v:?}")));
            }
        }
        Ok(RingCtx { n, vars })
    }

    /// Context with default variable names `x1..xt`.
    pub fn with_vars(n: u64, t: usize) -> Result<Self> {
        Self::new(n, (1..=t).map(|i| format!("x{i}")).collect())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn t(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn zero(&self) -> RingElement {
        RingElement::zero(self.n, self.t())
    }

    pub fn one(&self) -> RingElement {
        RingElement::one(self.n, self.t())
    }

    pub fn int(&self, v: i64) -> RingElement {
        RingElement::constant(self.n, self.t(), NLocInt::integer(BigInt::from(v)))
    }

    /// The `i`-th variable (0-based).
    pub fn var(&self, i: usize) -> RingElement {
        assert!(i < self.t(), "variable index out of range");
        let mut mono = vec![0; self.t()];
        mono[i] = 1;
        RingElement::monomial(self.n, mono, NLocInt::one())
    }

    pub fn check(&self, r: &RingElement) -> Result<()> {
        if r.n != self.n || r.nvars != self.t() {
            return Err(Error::ContextMismatch(format!(
                "element lives in Z[1/{}] with {} vars, context is Z[1/{}] with {}",
                r.n,
                r.nvars,
                self.n,
                self.t()
            )));
        }
        Ok(())
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Sparse polynomial over `Z[1/N]`: a map from exponent vectors to nonzero
/// canonical coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElement {
    n: u64,
    nvars: usize,
    terms: BTreeMap<Monomial, NLocInt>,
}

impl RingElement {
    pub fn zero(n: u64, nvars: usize) -> Self {
        RingElement { n, nvars, terms: BTreeMap::new() }
    }

    pub fn one(n: u64, nvars: usize) -> Self {
        Self::constant(n, nvars, NLocInt::one())
    }

    pub fn constant(n: u64, nvars: usize, c: NLocInt) -> Self {
        Self::monomial(n, vec![0; nvars], c)
    }

    pub fn monomial(n: u64, mono: Monomial, c: NLocInt) -> Self {
        let nvars = mono.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        RingElement { n, nvars, terms }
    }

    /// Builds from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms(n: u64, nvars: usize, terms: impl IntoIterator<Item = (Monomial, NLocInt)>) -> Self {
        let mut out = Self::zero(n, nvars);
        for (mono, c) in terms {
            assert_eq!(mono.len(), nvars, "exponent vector length");
            out.add_term(mono, c);
        }
        out
    }

    fn add_term(&mut self, mono: Monomial, c: NLocInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&c, self.n);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn base(&self) -> u64 {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &NLocInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().all(|(m, c)| c.is_one() && m.iter().all(|&e| e == 0))
    }

    /// The constant coefficient if the element is constant.
    pub fn as_constant(&self) -> Option<NLocInt> {
        match self.terms.len() {
            0 => Some(NLocInt::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    fn check_compat(&self, other: &Self) {
        assert!(
            self.n == other.n && self.nvars == other.nvars,
            "ring elements from different contexts: Z[1/{}]^{} vs Z[1/{}]^{}",
            self.n,
            self.nvars,
            other.n,
            other.nvars
        );
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.n, self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Value at a point of `F_p^t`. Fails if a coefficient denominator is not
    /// invertible mod `p`.
    pub fn eval_mod_p(&self, p: u64, point: &[u64]) -> Result<u64> {
        assert_eq!(point.len(), self.nvars, "point dimension");
        let mut acc = 0u64;
        for (mono, c) in &self.terms {
            let mut v = c.mod_p(p, self.n)?;
            for (&x, &e) in point.iter().zip(mono) {
                if e > 0 {
                    v = mul_mod(v, pow_mod(x, e as u64, p), p);
                }
            }
            acc = (acc + v) % p;
        }
        Ok(acc)
    }

    /// Coefficients reduced mod `p`, zero ones dropped.
    pub fn reduce_mod_p(&self, p: u64) -> Result<Vec<(Monomial, u64)>> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (mono, c) in &self.terms {
            let v = c.mod_p(p, self.n)?;
            if v != 0 {
                out.push((mono.clone(), v));
            }
        }
        Ok(out)
    }

    /// True when the image of the element in `F_p[x_1..x_t]` is nonzero.
    pub fn is_nonzero_mod_p(&self, p: u64) -> Result<bool> {
        Ok(!self.reduce_mod_p(p)?.is_empty())
    }

    /// Renders in the group-spec polynomial grammar using `vars` as names.
    pub fn to_string_with(&self, vars: &[String]) -> String {
        let mut s = String::new();
        if self.terms.is_empty() {
            return "0".into();
        }
        for (i, (mono, c)) in self.terms.iter().rev().enumerate() {
            let constant = mono.iter().all(|&e| e == 0);
            if c.is_negative() {
                s.push('-');
            } else if i > 0 {
                s.push('+');
            }
            let a = c.abs();
            let mut wrote = false;
            if constant || !a.is_one() {
                a.fmt_with(self.n, &mut s).unwrap();
                wrote = true;
            }
            for (j, &e) in mono.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote {
                    s.push('*');
                }
                s.push_str(&vars[j]);
                if e > 1 {
                    s.push('^');
                    s.push_str(&e.to_string());
                }
                wrote = true;
            }
        }
        s
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.to_string_with(&names))
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        self.check_compat(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement {
            n: self.n,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self + &(-rhs)
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        self.check_compat(rhs);
        let mut out = RingElement::zero(self.n, self.nvars);
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        if self.nvars == 0 {
            let a = self.terms.values().next().unwrap();
            let b = rhs.terms.values().next().unwrap();
            out.add_term(Vec::new(), a.mul(b, self.n));
            return out;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let mono: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                out.add_term(mono, ca.mul(cb, self.n));
            }
        }
        out
    }
}

impl RingElement {
    /// Sum of integer multiples `a * x^I`, a convenience for tests and examples.
    pub fn from_int_terms(ctx: &RingCtx, terms: &[(i64, &[u32])]) -> Self {
        Self::from_terms(
            ctx.n(),
            ctx.t(),
            terms
                .iter()
                .map(|&(a, m)| (m.to_vec(), NLocInt::integer(BigInt::from(a)))),
        )
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.exponent() == 0)
    }

    /// Largest absolute numerator, for sizing diagnostics.
    pub fn max_numerator_bits(&self) -> u64 {
        self.terms.values().map(|c| c.numerator().bits()).max().unwrap_or(0)
    }

    pub(crate) fn zero_like(&self) -> Self {
        Self::zero(self.n, self.nvars)
    }

    pub(crate) fn one_like(&self) -> Self {
        Self::one(self.n, self.nvars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(t: usize) -> RingCtx {
        RingCtx::with_vars(2, t).unwrap()
    }

    #[test]
    fn context_validation() {
        assert!(matches!(RingCtx::new(2, vec!["x".into()]), Err(Error::ReservedName(_))));
        assert!(RingCtx::new(1, vec![]).is_err());
        assert!(RingCtx::new(2, vec!["s".into(), "s".into()]).is_err());
        assert!(RingCtx::new(2, vec!["s".into(), "u".into()]).is_ok());
    }

    #[test]
    fn arithmetic_basics() {
        let c = ctx(2);
        let (x1, x2) = (c.var(0), c.var(1));
        let f = &(&x1 + &x2) * &(&x1 - &x2);
        let g = &(&x1 * &x1) - &(&x2 * &x2);
        assert_eq!(f, g);
        assert_eq!(f.degree(), 2);
        assert_eq!(f.support_len(), 2);
        assert!((&f - &g).is_zero());
        assert!(c.one().is_one());
        assert_eq!(c.int(3).as_constant().unwrap(), NLocInt::integer(3.into()));
    }

    #[test]
    fn evaluation_mod_p() {
        let c = ctx(1);
        let s = &(&c.var(0) * &c.var(0)) - &c.one();
        assert_eq!(s.eval_mod_p(7, &[3]).unwrap(), 1);
        assert_eq!(s.eval_mod_p(7, &[6]).unwrap(), 0);
        assert!(c.int(7).reduce_mod_p(7).unwrap().is_empty());
    }

    #[test]
    fn rendering() {
        let c = RingCtx::new(2, vec!["s".into()]).unwrap();
        let r = &(&c.int(2) * &c.var(0)) + &c.one();
        assert_eq!(r.to_string_with(c.vars()), "2*s+1");
        assert_eq!((-&c.var(0)).to_string_with(c.vars()), "-s");
        assert_eq!(c.zero().to_string_with(c.vars()), "0");
    }
}
