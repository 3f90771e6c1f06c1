//! Heights on `Z[1/N]` and `Z[1/N][x_1..x_t]`, reduction thresholds and
//! the escape-prime window.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::is_prime;
use crate::ring::{Mat, NLocInt, RingCtx, RingElement};

/// `max{k, log_N^+ |a / N^k|}`, and 0 at zero.
pub fn height_scalar(r: &NLocInt, n: u64) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let log = r.log2_abs(n) / (n as f64).log2();
    (r.exponent() as f64).max(log.max(0.0))
}

/// `max{h(a_I) + |I|}` over the support, 0 for the zero polynomial.
pub fn height_poly(r: &RingElement) -> f64 {
    r.terms()
        .map(|(mono, c)| height_scalar(c, r.base()) + mono.iter().sum::<u32>() as f64)
        .fold(0.0, f64::max)
}

/// Largest entry height.
pub fn height_matrix(m: &Mat) -> f64 {
    m.entries().iter().map(height_poly).fold(0.0, f64::max)
}

/// The constant `C_R` together with the ring it belongs to.
///
/// The default is `N^max(2, log2 N)`. The reduction argument bounds the
/// numerator of a height-`h` scalar by `N^(2h)`, so for `N < 4` the bare
/// `N^(log2 N)` is too small: with `N = 2`, `r = 3/2` has height 1 and
/// threshold 2, yet vanishes mod 3.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightConstants {
    pub c_r: f64,
    pub n: u64,
    pub t: usize,
}

impl HeightConstants {
    pub fn for_ctx(ctx: &RingCtx) -> Self {
        let n = ctx.n() as f64;
        HeightConstants { c_r: n.powf(n.log2().max(2.0)), n: ctx.n(), t: ctx.t() }
    }

    /// A caller-chosen constant; must be at least `N^(log2 N)`.
    pub fn new(c_r: f64, ctx: &RingCtx) -> Result<Self> {
        let n = ctx.n() as f64;
        let floor = n.powf(n.log2());
        if !(c_r >= floor) || !c_r.is_finite() {
            return Err(Error::InvalidArgument(format!("C_R = {c_r} is below N^log2(N) = {floor}")));
        }
        Ok(HeightConstants { c_r, n: ctx.n(), t: ctx.t() })
    }
}

/// `C_R^h(r)`: above it every prime leaves `r` nonzero mod `p`.
pub fn mod_p_threshold(r: &RingElement, consts: &HeightConstants) -> Result<f64> {
    if r.is_zero() {
        return Err(Error::ZeroElement);
    }
    Ok(consts.c_r.powf(height_poly(r)))
}

/// A prime found by [`find_escape_prime`] and how many times the window was
/// doubled to find it (0 means the first window `[n, C_R n]`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EscapePrime {
    pub p: u64,
    pub widenings: u32,
}

pub const MAX_WIDENINGS: u32 = 8;

/// Smallest prime `p >= n` with `p` not dividing `N` and `r` nonzero mod `p`,
/// searched in `[n, ceil(C_R n)]` and then in windows whose upper end doubles.
pub fn find_escape_prime(r: &RingElement, n: u64, consts: &HeightConstants) -> Result<EscapePrime> {
    if r.is_zero() {
        return Err(Error::ZeroElement);
    }
    let h = height_poly(r);
    if (n as f64) < h || n < consts.n {
        return Err(Error::InvalidArgument(format!(
            "n = {n} must be at least N = {} and h(r) = {h}",
            consts.n
        )));
    }
    let mut lo = n;
    let mut hi = (consts.c_r * n as f64).ceil() as u64;
    for widenings in 0..=MAX_WIDENINGS {
        for p in lo..=hi {
            if consts.n % p != 0 && is_prime(p) && r.is_nonzero_mod_p(p)? {
                return Ok(EscapePrime { p, widenings });
            }
        }
        lo = hi + 1;
        hi = hi.saturating_mul(2);
    }
    Err(Error::WindowExhausted(MAX_WIDENINGS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::primes_in;
    use crate::ring::parse_poly;
    use num_bigint::BigInt;

    fn q(a: i64, k: u32) -> NLocInt {
        NLocInt::canonical(BigInt::from(a), k, 2)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn scalar_heights() {
        assert!(close(height_scalar(&q(3, 1), 2), 1.0));
        assert!(close(height_scalar(&q(1, 0), 2), 0.0));
        assert!(close(height_scalar(&q(8, 0), 2), 3.0));
        assert!(close(height_scalar(&q(0, 0), 2), 0.0));
        // 1/8: k = 3 dominates log+ = 0
        assert!(close(height_scalar(&q(1, 3), 2), 3.0));
    }

    #[test]
    fn polynomial_and_matrix_heights() {
        let c = RingCtx::with_vars(2, 2).unwrap();
        assert!(close(height_poly(&parse_poly("3/2*x1^2", &c).unwrap()), 3.0));
        assert!(close(height_poly(&c.zero()), 0.0));
        assert!(close(height_poly(&parse_poly("x1 + 4*x2", &c).unwrap()), 3.0));

        let z = RingCtx::with_vars(2, 0).unwrap();
        assert!(close(height_matrix(&Mat::identity(&z, 2)), 0.0));
        assert!(close(height_matrix(&Mat::from_ints(&z, &[&[1, 2], &[0, 1]]).unwrap()), 1.0));
        let c1 = RingCtx::with_vars(2, 1).unwrap();
        let p = |s: &str| parse_poly(s, &c1).unwrap();
        let m = Mat::from_rows(vec![vec![p("1+2*x1"), p("x1")], vec![p("2"), p("1")]]).unwrap();
        assert!(close(height_matrix(&m), 2.0));
    }

    #[test]
    fn thresholds() {
        let z = RingCtx::with_vars(2, 0).unwrap();
        // with C_R = 2 the threshold for r = 3 is 2^log2(3) = 3
        let two = HeightConstants::new(2.0, &z).unwrap();
        let t = mod_p_threshold(&z.int(3), &two).unwrap();
        assert!((t - 3.0).abs() < 1e-9);
        for p in primes_in(5, 97) {
            assert!(z.int(3).is_nonzero_mod_p(p).unwrap());
        }
        let dflt = HeightConstants::for_ctx(&z);
        assert_eq!(dflt.c_r, 4.0);
        assert!(close(mod_p_threshold(&z.one(), &dflt).unwrap(), 1.0));
        assert!(matches!(mod_p_threshold(&z.zero(), &dflt), Err(Error::ZeroElement)));
        assert!(HeightConstants::new(1.5, &z).is_err());

        let c1 = RingCtx::with_vars(2, 1).unwrap();
        let r = parse_poly("6*x1", &c1).unwrap();
        let th = mod_p_threshold(&r, &HeightConstants::for_ctx(&c1)).unwrap();
        for p in primes_in(3, 100).into_iter().filter(|&p| p as f64 > th) {
            assert!(r.is_nonzero_mod_p(p).unwrap());
        }
    }

    #[test]
    fn bare_log_constant_is_too_small_for_small_n() {
        let z = RingCtx::with_vars(2, 0).unwrap();
        let bare = HeightConstants::new(2.0, &z).unwrap();
        let r = RingElement::constant(2, 0, q(3, 1));
        let th = mod_p_threshold(&r, &bare).unwrap();
        assert!(close(th, 2.0));
        // 3 > 2 yet 3/2 = 0 mod 3
        assert!(!r.is_nonzero_mod_p(3).unwrap());
        let th = mod_p_threshold(&r, &HeightConstants::for_ctx(&z)).unwrap();
        assert!(th >= 3.0);
    }

    #[test]
    fn escape_prime_search() {
        let z = RingCtx::with_vars(2, 0).unwrap();
        let k = HeightConstants::for_ctx(&z);
        assert_eq!(find_escape_prime(&z.int(15), 7, &k).unwrap(), EscapePrime { p: 7, widenings: 0 });
        assert_eq!(find_escape_prime(&z.int(7), 7, &k).unwrap().p, 11);
        assert_eq!(find_escape_prime(&z.one(), 11, &k).unwrap().p, 11);
        assert!(find_escape_prime(&z.zero(), 11, &k).is_err());
        assert!(find_escape_prime(&z.int(1 << 20), 3, &k).is_err());
    }

    #[test]
    fn narrow_window_widens_and_reports() {
        let z = RingCtx::with_vars(2, 0).unwrap();
        let k = HeightConstants { c_r: 1.0, n: 2, t: 0 };
        // window [7, 7] is killed by r = 7, the next one [8, 14] has 11
        assert_eq!(find_escape_prime(&z.int(7), 7, &k).unwrap(), EscapePrime { p: 11, widenings: 1 });
    }
}
