use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::primes::{inv_mod, pow_mod};

/// An element `a / N^k` of `Z[1/N]`, always stored in canonical form:
/// `k` is minimal, so either `k = 0` or `N` does not divide `a`. Zero is `(0, 0)`.
///
/// `N` itself is not stored; callers pass it in (it lives on the owning
/// [`RingElement`](super::RingElement) or [`RingCtx`](super::RingCtx)).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NLocInt {
    num: BigInt,
    exp: u32,
}

impl NLocInt {
    /// The canonical representative of `num / N^exp`.
    pub fn canonical(num: BigInt, exp: u32, n: u64) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let mut num = num;
        let mut exp = exp;
        let base = BigInt::from(n);
        while exp > 0 {
            let (q, r) = num.div_rem(&base);
            if !r.is_zero() {
                break;
            }
            num = q;
            exp -= 1;
        }
        NLocInt { num, exp }
    }

    pub fn zero() -> Self {
        NLocInt { num: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Self::integer(BigInt::one())
    }

    pub fn integer(num: BigInt) -> Self {
        NLocInt { num, exp: 0 }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exp == 0 && self.num.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn neg(&self) -> Self {
        NLocInt { num: -&self.num, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        NLocInt { num: self.num.abs(), exp: self.exp }
    }

    pub fn add(&self, other: &Self, n: u64) -> Self {
        if self.exp == other.exp {
            return Self::canonical(&self.num + &other.num, self.exp, n);
        }
        let (lo, hi) = if self.exp < other.exp { (self, other) } else { (other, self) };
        let scale = BigInt::from(n).pow(hi.exp - lo.exp);
        // lo has the smaller exponent, so after scaling N cannot divide the
        // sum unless it divides hi.num, which canonical form rules out.
        NLocInt { num: &lo.num * scale + &hi.num, exp: hi.exp }
    }

    pub fn mul(&self, other: &Self, n: u64) -> Self {
        let num = &self.num * &other.num;
        if self.exp == 0 && other.exp == 0 {
            return NLocInt { num, exp: 0 };
        }
        Self::canonical(num, self.exp + other.exp, n)
    }

    /// `log2 |a / N^k|`; `-inf` at zero.
    pub fn log2_abs(&self, n: u64) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        log2_big(&self.num) - self.exp as f64 * (n as f64).log2()
    }

    /// Image in `F_p`. Fails when `k > 0` and `p | N`.
    pub fn mod_p(&self, p: u64, n: u64) -> Result<u64> {
        let a = self.num.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits u64");
        if self.exp == 0 {
            return Ok(a);
        }
        let inv = inv_mod(n % p, p).ok_or(Error::NotInvertible(p))?;
        Ok(crate::primes::mul_mod(a, pow_mod(inv, self.exp as u64, p), p))
    }

    /// Numerator and denominator `N^k` as integers.
    pub fn as_fraction(&self, n: u64) -> (BigInt, BigInt) {
        (self.num.clone(), BigInt::from(n).pow(self.exp))
    }

    /// Exact comparison of values.
    pub fn cmp_value(&self, other: &Self, n: u64) -> Ordering {
        let (a, da) = self.as_fraction(n);
        let (b, db) = other.as_fraction(n);
        (a * db).cmp(&(b * da))
    }

    pub(crate) fn fmt_with(&self, n: u64, f: &mut impl fmt::Write) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, BigInt::from(n).pow(self.exp))
        }
    }
}

/// `log2 |a|` for arbitrarily large integers.
pub fn log2_big(a: &BigInt) -> f64 {
    let bits = a.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return a.abs().to_f64().expect("finite below 2^1000").log2();
    }
    let shift = bits - 64;
    let top = (a.abs() >> shift).to_u64().expect("64 leading bits");
    (top as f64).log2() + shift as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(num: i64, exp: u32, n: u64) -> NLocInt {
        NLocInt::canonical(BigInt::from(num), exp, n)
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(c(6, 1, 2), NLocInt::integer(BigInt::from(3)));
        let x = c(3, 1, 2);
        assert_eq!((x.numerator().clone(), x.exponent()), (BigInt::from(3), 1));
        assert_eq!(c(0, 5, 2), NLocInt::zero());
        assert_eq!(c(0, 5, 2).exponent(), 0);
    }

    #[test]
    fn composite_base() {
        // 3/6 = 1/2 needs one factor of 6
        let x = c(3, 1, 6);
        assert_eq!(x.exponent(), 1);
        assert_eq!(c(36, 2, 6), NLocInt::one());
        assert_eq!(c(12, 2, 6), c(2, 1, 6));
    }

    #[test]
    fn reduction_mod_p() {
        // 3/2 mod 5 = 4 since 2 * 4 = 8 = 3
        assert_eq!(c(3, 1, 2).mod_p(5, 2).unwrap(), 4);
        assert_eq!(c(-1, 0, 2).mod_p(7, 2).unwrap(), 6);
        assert!(c(1, 1, 2).mod_p(2, 2).is_err());
        assert_eq!(c(5, 0, 2).mod_p(2, 2).unwrap(), 1);
    }

    #[test]
    fn log2_large() {
        let big = BigInt::from(1u8) << 3000usize;
        assert!((log2_big(&big) - 3000.0).abs() < 1e-9);
        assert!((log2_big(&BigInt::from(8)) - 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn canonical_is_idempotent_and_value_preserving(a in -10_000i64..10_000, k in 0u32..6, n in 2u64..13) {
            let x = c(a, k, n);
            let again = NLocInt::canonical(x.numerator().clone(), x.exponent(), n);
            prop_assert_eq!(&again, &x);
            // value check: a * N^{k'} == a' * N^{k}
            let lhs = BigInt::from(a) * BigInt::from(n).pow(x.exponent());
            let rhs = x.numerator() * BigInt::from(n).pow(k);
            prop_assert_eq!(lhs, rhs);
            if x.exponent() > 0 {
                prop_assert!(!(x.numerator() % BigInt::from(n)).is_zero());
            }
        }

        #[test]
        fn add_mul_agree_with_fractions(a in -500i64..500, ka in 0u32..4, b in -500i64..500, kb in 0u32..4, n in 2u64..7) {
            let (x, y) = (c(a, ka, n), c(b, kb, n));
            let nn = BigInt::from(n);
            let s = x.add(&y, n);
            let (sn, sd) = s.as_fraction(n);
            let (xn, xd) = (BigInt::from(a), nn.pow(ka));
            let (yn, yd) = (BigInt::from(b), nn.pow(kb));
            prop_assert_eq!(&sn * &xd * &yd, (&xn * &yd + &yn * &xd) * &sd);
            let m = x.mul(&y, n);
            let (mn, md) = m.as_fraction(n);
            prop_assert_eq!(&mn * &xd * &yd, &xn * &yn * &md);
            let again = NLocInt::canonical(s.numerator().clone(), s.exponent(), n);
            prop_assert_eq!(again, s);
        }
    }
}
