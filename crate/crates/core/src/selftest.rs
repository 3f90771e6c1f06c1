//! Randomized property suites over the whole toolkit. Each suite returns one
//! [`PropertyResult`] per property; `max_slack` is the largest `lhs - rhs`
//! seen, so a value above the tolerance is a violation.

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cayley::{bfs_closure, is_generating, rw_bound_check, rw_threshold, sl_order, spectral_gap};
use crate::error::{Error, Result};
use crate::freeprod::{identity_factory, reduce, IdentitySpec, MixedWord};
use crate::groups;
use crate::heights::{find_escape_prime, height_poly, mod_p_threshold, HeightConstants};
use crate::modp::{count_zeros, dkl_bound, reduce_matrix, LetterImages, Specialization};
use crate::primes::{is_prime, primes_in};
use crate::ring::{GroupSpec, Letter, NLocInt, RingCtx, RingElement};
use crate::rng::{substream, AUX_STREAM_BASE};
use crate::walk::walk_letters;
use crate::escape::random_word;

/// Slack allowed on floating-point height comparisons.
pub const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub property: String,
    pub samples: u64,
    pub violations: u64,
    pub max_slack: f64,
}

impl PropertyResult {
    fn new(property: &str) -> Self {
        PropertyResult { property: property.to_string(), samples: 0, violations: 0, max_slack: f64::NEG_INFINITY }
    }

    /// Records `lhs <= rhs` up to [`SLACK`].
    fn check(&mut self, lhs: f64, rhs: f64) {
        self.record(lhs - rhs <= SLACK, lhs - rhs);
    }

    fn record(&mut self, ok: bool, slack: f64) {
        self.samples += 1;
        self.violations += u64::from(!ok);
        self.max_slack = self.max_slack.max(slack);
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.samples > 0
    }
}

/// Sample counts for a full or quick run.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub large: u64,
    pub small: u64,
}

impl Budget {
    pub const FULL: Budget = Budget { large: 10_000, small: 1_000 };
    pub const QUICK: Budget = Budget { large: 500, small: 100 };
}

fn rng_for(seed: u64, suite: u64) -> ChaCha8Rng {
    substream(seed, AUX_STREAM_BASE + 32 + suite)
}

/// Bases used by the random ring elements.
pub const BASES: [u64; 4] = [2, 3, 6, 10];

/// A random element of `Z[1/N]` of height at most `h`.
pub fn random_scalar(n: u64, h: u32, rng: &mut impl Rng) -> NLocInt {
    let k = rng.random_range(0..=h.min(3));
    let bound = BigInt::from(n).pow(rng.random_range(0..=h) + k);
    let bound = i128::try_from(bound).unwrap_or(i128::MAX / 2);
    let a = rng.random_range(-bound..=bound);
    NLocInt::canonical(BigInt::from(a), k, n)
}

/// A random polynomial with at most `terms` terms, total degree at most
/// `deg` and height at most `h` (degree counts toward the height).
pub fn random_poly(ctx: &RingCtx, terms: usize, deg: u32, h: u32, rng: &mut impl Rng) -> RingElement {
    let t = ctx.t();
    let count = rng.random_range(1..=terms);
    let items = (0..count).map(|_| {
        let mut mono = vec![0u32; t];
        let total = if t == 0 { 0 } else { rng.random_range(0..=deg.min(h)) };
        for _ in 0..total {
            mono[rng.random_range(0..t)] += 1;
        }
        let c = random_scalar(ctx.n(), h - total, rng);
        (mono, c)
    });
    RingElement::from_terms(ctx.n(), t, items)
}

fn random_nonzero(ctx: &RingCtx, terms: usize, deg: u32, h: u32, rng: &mut impl Rng) -> RingElement {
    loop {
        let r = random_poly(ctx, terms, deg, h, rng);
        if !r.is_zero() {
            return r;
        }
    }
}

fn random_ctx(rng: &mut impl Rng, max_t: usize) -> RingCtx {
    let n = BASES[rng.random_range(0..BASES.len())];
    RingCtx::with_vars(n, rng.random_range(0..=max_t)).expect("valid context")
}

fn binom(n: u64, k: u64) -> u64 {
    (1..=k).fold(1u64, |acc, i| acc * (n + 1 - i) / i)
}

/// Sum, product, pair-product and support bounds for heights.
pub fn heights_suite(samples: u64, seed: u64) -> Vec<PropertyResult> {
    let mut rng = rng_for(seed, 0);
    let mut sum = PropertyResult::new("height.sum");
    let mut prod = PropertyResult::new("height.product");
    let mut sharp = PropertyResult::new("height.product.scalar_pair");
    let mut pair = PropertyResult::new("height.pair");
    let mut support = PropertyResult::new("height.support");
    for _ in 0..samples {
        let ctx = random_ctx(&mut rng, 2);
        let (n, t) = (ctx.n() as f64, ctx.t() as f64);
        let c_r = HeightConstants::for_ctx(&ctx).c_r;

        let m = rng.random_range(1..=8);
        let rs: Vec<RingElement> = (0..m).map(|_| random_poly(&ctx, 4, 4, 12, &mut rng)).collect();
        let total = rs.iter().fold(ctx.zero(), |acc, r| &acc + r);
        let max_h = rs.iter().map(height_poly).fold(0.0, f64::max);
        sum.check(height_poly(&total), (m as f64).ln() / n.ln() + max_h);

        let m = rng.random_range(1..=8);
        let rs: Vec<RingElement> = (0..m).map(|_| random_poly(&ctx, 2, 2, 12, &mut rng)).collect();
        let product = rs.iter().fold(ctx.one(), |acc, r| &acc * r);
        let sum_h: f64 = rs.iter().map(height_poly).sum();
        prod.check(height_poly(&product), m as f64 * c_r + (t + 1.0) * sum_h);

        let q = RingCtx::with_vars(ctx.n(), 0).expect("valid context");
        let (q1, q2) = (random_poly(&q, 1, 0, 12, &mut rng), random_poly(&q, 1, 0, 12, &mut rng));
        sharp.check(height_poly(&(&q1 * &q2)), height_poly(&q1) + height_poly(&q2));

        let (a, b) = (random_poly(&ctx, 6, 4, 10, &mut rng), random_poly(&ctx, 6, 4, 10, &mut rng));
        pair.check(height_poly(&(&a * &b)), (t + 2.0) * height_poly(&a) + height_poly(&b));

        // dense-ish polynomial of degree >= 2
        let tt = rng.random_range(1..=2u64);
        let dctx = RingCtx::with_vars(ctx.n(), tt as usize).expect("valid context");
        let deg = rng.random_range(2..=6u32);
        let cap = binom(deg as u64 + tt, tt) as usize;
        let mut a = random_poly(&dctx, cap, deg, deg + 4, &mut rng);
        let mut top = vec![0u32; tt as usize];
        top[0] = deg;
        a = &a + &RingElement::monomial(dctx.n(), top, NLocInt::one());
        let d = a.degree() as f64;
        if d >= 2.0 {
            let s = a.support_len() as f64;
            support.record(s < d.powf(tt as f64 + 1.0) && s <= binom(d as u64 + tt, tt) as f64, s - d.powf(tt as f64 + 1.0));
        }
    }
    vec![sum, prod, sharp, pair, support]
}

/// Nonvanishing above the threshold and the escape-prime window.
pub fn nonvanishing_suite(samples: u64, seed: u64) -> Vec<PropertyResult> {
    let mut rng = rng_for(seed, 1);
    let mut above = PropertyResult::new("modp.nonvanishing_above_threshold");
    let mut window = PropertyResult::new("modp.escape_prime_within_two_windows");
    let small_primes = primes_in(2, 200);
    for _ in 0..samples {
        let ctx = random_ctx(&mut rng, 2);
        let consts = HeightConstants::for_ctx(&ctx);
        let r = random_nonzero(&ctx, 4, 3, 8, &mut rng);
        let threshold = mod_p_threshold(&r, &consts).expect("nonzero");
        let mut ok = true;
        for &p in small_primes.iter().filter(|&&p| p as f64 > threshold && ctx.n() % p != 0) {
            ok &= r.is_nonzero_mod_p(p).unwrap_or(false);
        }
        above.record(ok, if ok { 0.0 } else { 1.0 });
        let n = ctx.n().max(height_poly(&r).ceil() as u64);
        let found = find_escape_prime(&r, n, &consts);
        let widenings = found.as_ref().map_or(u32::MAX, |e| e.widenings);
        window.record(widenings <= 1, widenings as f64 - 1.0);
    }
    vec![above, window]
}

/// Reduction, substitution and the mod-p commutation square on random words.
pub fn freeprod_suite(samples: u64, seed: u64) -> Result<Vec<PropertyResult>> {
    let mut rng = rng_for(seed, 2);
    let mut idem = PropertyResult::new("freeprod.reduce_idempotent");
    let mut hom = PropertyResult::new("freeprod.substitution_homomorphism");
    let mut square = PropertyResult::new("freeprod.modp_commutes");
    let specs = [groups::free_pair(), groups::with_minus_identity(), groups::borel()];
    let primes = [5u64, 7, 11, 13, 17, 19, 23, 29, 31];
    for i in 0..samples {
        let spec = &specs[i as usize % specs.len()];
        let u = random_word(spec, rng.random_range(1..=10), &mut rng)?;
        let v = random_word(spec, rng.random_range(1..=10), &mut rng)?;
        let mut raw = u.syllables().to_vec();
        raw.extend_from_slice(v.syllables());
        let once = reduce(&raw);
        let ok = reduce(once.syllables()) == once && once == u.mul(&v) && reduce(u.syllables()) == u;
        idem.record(ok, f64::from(u8::from(!ok)));

        let gamma = spec.element(&walk_letters(spec, rng.random_range(0..=5), 0.0, &mut rng));
        let uv = u.mul(&v).evaluate(&gamma)?;
        let (ug, vg) = (u.evaluate(&gamma)?, v.evaluate(&gamma)?);
        let ok = uv.same_matrix(&ug.mul(&vg)?) && u.inverse().evaluate(&gamma)?.same_matrix(&ug.inverse());
        hom.record(ok, f64::from(u8::from(!ok)));

        let p = primes[rng.random_range(0..primes.len())];
        let phi = Specialization::new(p, vec![], spec)?;
        let images = LetterImages::new(spec, &phi)?;
        let direct = reduce_matrix(ug.mat(), &phi)?;
        let via = u.evaluate_mod_p(&reduce_matrix(gamma.mat(), &phi)?, &images);
        square.record(direct == via, f64::from(u8::from(direct != via)));
    }
    Ok(vec![idem, hom, square])
}

/// The identity factory on groups where each identity holds, plus the
/// central identity on a whole ball.
pub fn identities_suite(samples: u64, seed: u64, central_radius: usize) -> Result<Vec<PropertyResult>> {
    let mut rng = rng_for(seed, 3);
    let mut out = Vec::new();
    let minus = groups::with_minus_identity();
    let borel = groups::borel();
    let blocks = groups::block_diagonal();
    let cases: Vec<(&str, &GroupSpec, MixedWord)> = vec![
        (
            "identity.finite_normalized",
            &minus,
            identity_factory(&IdentitySpec::FiniteNormalized { a: minus.letter_element(Letter(3)), k: 1, order: 2 })?,
        ),
        (
            "identity.infinite_abelian_normalized",
            &borel,
            identity_factory(&IdentitySpec::InfiniteAbelianNormalized { a: borel.letter_element(Letter(1)), k: 1 })?,
        ),
        (
            "identity.centralized",
            &blocks,
            identity_factory(&IdentitySpec::Centralized {
                b: blocks.letter_element(Letter(1)),
                c: blocks.letter_element(Letter(3)),
                k: 1,
            })?,
        ),
    ];
    for (name, spec, w) in cases {
        let mut res = PropertyResult::new(name);
        for _ in 0..samples {
            let gamma = spec.element(&walk_letters(spec, rng.random_range(0..=12), 0.0, &mut rng));
            let ok = w.evaluate(&gamma)?.is_identity();
            res.record(ok, f64::from(u8::from(!ok)));
        }
        out.push(res);
    }
    let central = identity_factory(&IdentitySpec::Central { a: minus.letter_element(Letter(3)) })?;
    let mut res = PropertyResult::new("identity.central_ball");
    let mut layer = vec![minus.identity()];
    let mut seen = std::collections::HashSet::from([minus.identity().mat().clone()]);
    for r in 0..=central_radius {
        for g in &layer {
            let ok = central.evaluate(g)?.is_identity();
            res.record(ok, f64::from(u8::from(!ok)));
        }
        if r == central_radius {
            break;
        }
        let mut next = Vec::new();
        for g in &layer {
            for l in minus.letters() {
                let h = g.mul(&minus.letter_element(l))?;
                if seen.insert(h.mat().clone()) {
                    next.push(h);
                }
            }
        }
        layer = next;
    }
    out.push(res);
    Ok(out)
}

/// Outcome of [`dkl_suite`], with the measured specialization constant.
#[derive(Clone, Debug, Serialize)]
pub struct DklOutcome {
    pub results: Vec<PropertyResult>,
    /// `max Pr(φ(s) = 0) · p / h(s)` over the samples.
    pub measured_c: f64,
}

/// Exhaustive zero counts against `deg · p^(t-1)` and `h(s) / p`.
pub fn dkl_suite(samples: u64, seed: u64) -> Result<DklOutcome> {
    let mut rng = rng_for(seed, 4);
    let mut count_bound = PropertyResult::new("dkl.zero_count");
    let mut prob_bound = PropertyResult::new("dkl.specialization_probability");
    let primes: Vec<u64> = primes_in(2, 31);
    let mut measured_c = 0.0f64;
    let mut done = 0;
    while done < samples {
        let ctx = random_ctx(&mut rng, 2);
        let p = primes[rng.random_range(0..primes.len())];
        if ctx.n() % p == 0 {
            continue;
        }
        let s = random_nonzero(&ctx, 6, 6, 10, &mut rng);
        let zeros = match count_zeros(&s, p) {
            Ok(z) => z,
            Err(Error::VanishesModP(_)) => continue,
            Err(e) => return Err(e),
        };
        done += 1;
        count_bound.check(zeros as f64, dkl_bound(&s, p));
        let h = height_poly(&s);
        let pr = zeros as f64 / (p as f64).powi(ctx.t() as i32);
        if h > 0.0 {
            measured_c = measured_c.max(pr * p as f64 / h);
            prob_bound.check(pr, h / p as f64);
        } else {
            prob_bound.record(zeros == 0, zeros as f64);
        }
    }
    Ok(DklOutcome { results: vec![count_bound, prob_bound], measured_c })
}

/// Generation of `SL_2(F_p)` by the free pair and the random-walk bound on
/// `SL_2(F_5)`.
pub fn cayley_suite(max_p: u64, subsets: u64, seed: u64) -> Result<Vec<PropertyResult>> {
    let mut rng = rng_for(seed, 5);
    let spec = groups::free_pair();
    let mut gen = PropertyResult::new("cayley.free_pair_generates");
    let mut sandwich = PropertyResult::new("cayley.order_sandwich");
    for p in (5..=max_p).filter(|&p| is_prime(p)) {
        let phi = Specialization::new(p, vec![], &spec)?;
        let table = bfs_closure(&crate::modp::reduce_generators(&spec, &phi)?, 1 << 20)?;
        let ok = is_generating(&table) && table.order() as u128 == sl_order(2, p);
        gen.record(ok, f64::from(u8::from(!ok)));
        let (n, pf) = (table.order() as f64, p as f64);
        sandwich.record((pf - 1.0).powi(3) <= n && n <= (pf + 1.0).powi(3), 0.0);
    }
    let phi = Specialization::new(5, vec![], &spec)?;
    let table = bfs_closure(&crate::modp::reduce_generators(&spec, &phi)?, 1000)?;
    let graph = table.graph();
    let eps = spectral_gap(&graph)?.gap;
    let k0 = rw_threshold(graph.n, eps).ok_or_else(|| Error::Consistency("zero spectral gap".into()))?;
    let mut rw = PropertyResult::new("cayley.random_walk_bound");
    for _ in 0..subsets {
        let size = rng.random_range(1..graph.n);
        let u: Vec<u32> = sample(&mut rng, graph.n, size).iter().map(|i| i as u32).collect();
        let k = rng.random_range(k0..=3 * k0);
        let r = rw_bound_check(&graph, &u, k, 0, eps)?;
        rw.record(r.pass, r.probability - r.bound);
    }
    Ok(vec![gen, sandwich, rw])
}

/// Every suite, at full or quick sample counts.
pub fn run_all(budget: Budget, seed: u64) -> Result<(Vec<PropertyResult>, f64)> {
    let mut out = heights_suite(budget.large, seed);
    out.extend(nonvanishing_suite(budget.small, seed));
    out.extend(freeprod_suite(budget.large, seed)?);
    out.extend(identities_suite(budget.small, seed, if budget.large >= 10_000 { 6 } else { 4 })?);
    let dkl = dkl_suite(budget.small, seed)?;
    out.extend(dkl.results);
    out.extend(cayley_suite(if budget.large >= 10_000 { 31 } else { 13 }, budget.small / 10, seed)?);
    Ok((out, dkl.measured_c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_scalars_respect_height() {
        let mut rng = substream(1, 0);
        for _ in 0..2000 {
            let n = BASES[rng.random_range(0..4)];
            let h = rng.random_range(0..=12);
            let q = random_scalar(n, h, &mut rng);
            assert!(crate::heights::height_scalar(&q, n) <= h as f64 + SLACK);
        }
    }

    #[test]
    fn random_polys_respect_height() {
        let mut rng = substream(2, 0);
        for _ in 0..500 {
            let ctx = random_ctx(&mut rng, 2);
            let r = random_poly(&ctx, 5, 4, 9, &mut rng);
            assert!(height_poly(&r) <= 9.0 + SLACK + (5f64).log2());
        }
    }

    #[test]
    fn quick_suites_pass() {
        let (results, c) = run_all(Budget { large: 100, small: 30 }, 7).unwrap();
        for r in &results {
            assert!(r.passed(), "{r:?}");
        }
        assert!(c <= 1.0);
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), 10);
        assert_eq!(binom(8, 2), 28);
        assert_eq!(binom(3, 0), 1);
    }
}
