//! Specializations `R[1/r] -> F_p`, reduction of matrices, and exhaustive
//! zero counting over `F_p^t`.

mod fpmat;

pub use fpmat::FpMatrix;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::{is_prime, mul_mod, pow_mod};
use crate::ring::{GroupSpec, Letter, Mat, Monomial, RingCtx, RingElement};
use crate::rng::{substream, AUX_STREAM_BASE};

/// Default limit on `p^t` for exhaustive enumeration.
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// A polynomial with coefficients already reduced mod `p`.
#[derive(Clone, Debug)]
pub struct FpPoly {
    p: u64,
    terms: Vec<(Monomial, u64)>,
}

impl FpPoly {
    pub fn new(r: &RingElement, p: u64) -> Result<Self> {
        Ok(FpPoly { p, terms: r.reduce_mod_p(p)? })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, point: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for (mono, c) in &self.terms {
            let mut v = *c;
            for (&x, &e) in point.iter().zip(mono) {
                if e > 0 {
                    v = mul_mod(v, pow_mod(x, e as u64, p), p);
                }
            }
            acc = (acc + v) % p;
        }
        acc
    }
}

/// A homomorphism `Z[1/N][x_1..x_t][1/r] -> F_p`: a prime and a point where
/// the localizer does not vanish.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Specialization {
    pub p: u64,
    pub point: Vec<u64>,
}

impl Specialization {
    pub fn new(p: u64, point: Vec<u64>, spec: &GroupSpec) -> Result<Self> {
        check_prime(p, spec.ctx())?;
        if point.len() != spec.ctx().t() {
            return Err(Error::DimensionMismatch(spec.ctx().t(), point.len()));
        }
        if point.iter().any(|&a| a >= p) {
            return Err(Error::InvalidArgument(format!("point {point:?} is not reduced mod {p}")));
        }
        if spec.localizer().eval_mod_p(p, &point)? == 0 {
            return Err(Error::InvalidArgument(format!("localizer vanishes at {point:?} mod {p}")));
        }
        Ok(Specialization { p, point })
    }

    pub fn eval(&self, r: &RingElement) -> Result<u64> {
        r.eval_mod_p(self.p, &self.point)
    }
}

fn check_prime(p: u64, ctx: &RingCtx) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if ctx.n() % p == 0 {
        return Err(Error::PrimeDividesBase { p, n: ctx.n() });
    }
    Ok(())
}

/// `|Hom(Z[1/N][x_1..x_t], F_p)| = p^t` for `p` not dividing `N`.
pub fn count_homs(p: u64, ctx: &RingCtx) -> Result<u128> {
    check_prime(p, ctx)?;
    Ok((p as u128).pow(ctx.t() as u32))
}

/// Uniform specialization conditioned on `r(a) != 0`, drawn from an auxiliary
/// substream of `seed`.
pub fn sample_hom(p: u64, spec: &GroupSpec, seed: u64) -> Result<Specialization> {
    sample_hom_with(p, spec, &mut substream(seed, AUX_STREAM_BASE))
}

/// Rejection sampling with `64 t` draws, then an exhaustive fallback that
/// picks uniformly among the valid points.
pub fn sample_hom_with(p: u64, spec: &GroupSpec, rng: &mut impl Rng) -> Result<Specialization> {
    let ctx = spec.ctx();
    check_prime(p, ctx)?;
    let t = ctx.t();
    let r = FpPoly::new(spec.localizer(), p)?;
    if t == 0 {
        if r.eval(&[]) == 0 {
            return Err(Error::LocalizerVanishes { p, t });
        }
        return Ok(Specialization { p, point: Vec::new() });
    }
    for _ in 0..64 * t {
        let point: Vec<u64> = (0..t).map(|_| rng.random_range(0..p)).collect();
        if r.eval(&point) != 0 {
            return Ok(Specialization { p, point });
        }
    }
    let total = (p as u128).pow(t as u32);
    if total > ENUMERATION_CAP {
        return Err(Error::CapExceeded { needed: total, cap: ENUMERATION_CAP });
    }
    let valid: Vec<Vec<u64>> = points(p, t).filter(|a| r.eval(a) != 0).collect();
    if valid.is_empty() {
        return Err(Error::LocalizerVanishes { p, t });
    }
    let point = valid[rng.random_range(0..valid.len())].clone();
    Ok(Specialization { p, point })
}

/// All of `F_p^t` in lexicographic order.
pub fn points(p: u64, t: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = (p as u128).pow(t as u32);
    (0..total).map(move |mut idx| {
        let mut a = vec![0u64; t];
        for slot in a.iter_mut().rev() {
            *slot = (idx % p as u128) as u64;
            idx /= p as u128;
        }
        a
    })
}

/// Entrywise image of `m` under the specialization.
pub fn reduce_matrix(m: &Mat, phi: &Specialization) -> Result<FpMatrix> {
    let entries = m.entries().iter().map(|e| phi.eval(e)).collect::<Result<Vec<_>>>()?;
    Ok(FpMatrix::from_raw(m.dim(), phi.p, entries))
}

/// Images of the letters of `X` in the order of [`GroupSpec::letters`].
pub fn reduce_generators(spec: &GroupSpec, phi: &Specialization) -> Result<Vec<FpMatrix>> {
    spec.letters().into_iter().map(|l| reduce_matrix(spec.letter_mat(l), phi)).collect()
}

/// Images of the letters of `X` under one specialization.
#[derive(Clone, Debug)]
pub struct LetterImages {
    p: u64,
    d: usize,
    mats: Vec<FpMatrix>,
}

impl LetterImages {
    pub fn new(spec: &GroupSpec, phi: &Specialization) -> Result<Self> {
        Ok(LetterImages { p: phi.p, d: spec.d(), mats: reduce_generators(spec, phi)? })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn of(&self, l: Letter) -> &FpMatrix {
        &self.mats[2 * l.generator() + usize::from(l.is_inverse())]
    }

    /// Product of the letter images, left to right.
    pub fn word(&self, word: &[Letter]) -> FpMatrix {
        let mut acc = FpMatrix::identity(self.d, self.p);
        for &l in word {
            acc = acc.mul(self.of(l));
        }
        acc
    }
}

/// Exact number of zeros of `s` on `F_p^t`.
pub fn count_zeros(s: &RingElement, p: u64) -> Result<u64> {
    count_zeros_capped(s, p, ENUMERATION_CAP)
}

pub fn count_zeros_capped(s: &RingElement, p: u64, cap: u128) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let t = s.nvars();
    let total = (p as u128).pow(t as u32);
    if total > cap {
        return Err(Error::CapExceeded { needed: total, cap });
    }
    let f = FpPoly::new(s, p)?;
    if f.is_zero() {
        return Err(Error::VanishesModP(p));
    }
    if t == 0 {
        return Ok(0);
    }
    // split on the first coordinate; the count does not depend on the split
    let count = (0..p)
        .into_par_iter()
        .map(|a0| {
            let mut n = 0u64;
            for rest in points(p, t - 1) {
                let mut a = Vec::with_capacity(t);
                a.push(a0);
                a.extend(rest);
                if f.eval(&a) == 0 {
                    n += 1;
                }
            }
            n
        })
        .sum();
    Ok(count)
}

/// `deg(s) p^(t-1)`, the bound on the zero count.
pub fn dkl_bound(s: &RingElement, p: u64) -> f64 {
    s.degree() as f64 * (p as f64).powi(s.nvars() as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{family, free_pair};
    use crate::ring::{parse_poly, GroupSpec};
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn hom_counts() {
        let c = |t| RingCtx::with_vars(2, t).unwrap();
        assert_eq!(count_homs(7, &c(0)).unwrap(), 1);
        assert_eq!(count_homs(5, &c(1)).unwrap(), 5);
        assert_eq!(count_homs(3, &c(2)).unwrap(), 9);
        assert!(matches!(count_homs(2, &c(1)), Err(Error::PrimeDividesBase { .. })));
        assert!(matches!(count_homs(9, &c(1)), Err(Error::NotPrime(9))));
    }

    #[test]
    fn reduction_examples() {
        let z = RingCtx::with_vars(2, 0).unwrap();
        let fp = free_pair();
        let phi = Specialization::new(5, vec![], &fp).unwrap();
        let a = Mat::from_ints(&z, &[&[1, 2], &[0, 1]]).unwrap();
        assert_eq!(reduce_matrix(&a, &phi).unwrap(), FpMatrix::new(2, 5, &[1, 2, 0, 1]).unwrap());
        let r = parse_poly("3/2", &z).unwrap();
        assert_eq!(phi.eval(&r).unwrap(), 4);
        let fam = family();
        let phi = Specialization::new(7, vec![3], &fam).unwrap();
        assert_eq!(
            reduce_matrix(&fam.generators()[0].mat, &phi).unwrap(),
            FpMatrix::new(2, 7, &[1, 3, 0, 1]).unwrap()
        );
    }

    #[test]
    fn reduction_is_multiplicative() {
        let fam = family();
        let phi = Specialization::new(11, vec![4], &fam).unwrap();
        let x = fam.generators()[0].mat.clone();
        let y = fam.generators()[1].inv.clone();
        let xy = x.mul(&y).unwrap();
        let lhs = reduce_matrix(&xy, &phi).unwrap();
        let rhs = reduce_matrix(&x, &phi).unwrap().mul(&reduce_matrix(&y, &phi).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn zero_counts() {
        let c1 = RingCtx::with_vars(2, 1).unwrap();
        let c2 = RingCtx::with_vars(2, 2).unwrap();
        let s = parse_poly("x1", &c1).unwrap();
        assert_eq!(count_zeros(&s, 7).unwrap(), 1);
        assert_eq!(dkl_bound(&s, 7), 1.0);
        let s = parse_poly("x1^2-1", &c1).unwrap();
        assert_eq!(count_zeros(&s, 7).unwrap(), 2);
        let s = parse_poly("x1*x2", &c2).unwrap();
        assert_eq!(count_zeros(&s, 5).unwrap(), 9);
        assert_eq!(dkl_bound(&s, 5), 10.0);
        let s = parse_poly("7*x1", &c1).unwrap();
        assert!(matches!(count_zeros(&s, 7), Err(Error::VanishesModP(7))));
        assert!(matches!(count_zeros_capped(&s, 11, 5), Err(Error::CapExceeded { .. })));
    }

    fn localized_family() -> GroupSpec {
        GroupSpec::parse(
            r#"{"t": 1, "d": 2, "generators": {"A": [["1","x1"],["0","1"]]}, "localizer": "x1"}"#,
        )
        .unwrap()
    }

    #[test]
    fn sampling_avoids_zero_locus() {
        let spec = localized_family();
        let mut seen = [0u32; 5];
        for seed in 0..400 {
            let phi = sample_hom(5, &spec, seed).unwrap();
            seen[phi.point[0] as usize] += 1;
        }
        assert_eq!(seen[0], 0);
        assert!(seen[1..].iter().all(|&c| c > 50));
        // t = 0 is deterministic
        assert_eq!(sample_hom(7, &free_pair(), 1).unwrap(), sample_hom(7, &free_pair(), 2).unwrap());
        assert_eq!(sample_hom(5, &spec, 9).unwrap(), sample_hom(5, &spec, 9).unwrap());
    }

    #[test]
    fn sampling_is_uniform_chi_squared() {
        let spec = family();
        let p = 11;
        let mut counts = vec![0f64; p as usize];
        let draws = 10_000;
        for i in 0..draws {
            let mut rng = substream(42, i);
            counts[sample_hom_with(p, &spec, &mut rng).unwrap().point[0] as usize] += 1.0;
        }
        let e = draws as f64 / p as f64;
        let stat: f64 = counts.iter().map(|c| (c - e).powi(2) / e).sum();
        let pval = 1.0 - ChiSquared::new((p - 1) as f64).unwrap().cdf(stat);
        assert!(pval > 0.01, "chi2 = {stat}, p-value = {pval}");
    }

    #[test]
    fn localizer_vanishing_everywhere() {
        let spec = GroupSpec::parse(
            r#"{"t": 1, "d": 2, "generators": {"A": [[1,1],[0,1]]}, "localizer": "x1^3 - x1"}"#,
        )
        .unwrap();
        // x^3 - x vanishes on all of F_3
        assert!(matches!(sample_hom(3, &spec, 0), Err(Error::LocalizerVanishes { p: 3, t: 1 })));
        assert!(sample_hom(5, &spec, 0).is_ok());
    }
}
