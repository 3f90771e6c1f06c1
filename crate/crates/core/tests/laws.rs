//! Algebraic laws of rings, matrices and mixed words, checked on random inputs.

use proptest::prelude::*;
use rand::Rng;

use mifkit_core::escape::{random_element, random_word};
use mifkit_core::freeprod::MixedWord;
use mifkit_core::groups::{block_diagonal, family, free_pair};
use mifkit_core::modp::{reduce_matrix, LetterImages, Specialization};
use mifkit_core::ring::{GroupSpec, RingCtx, RingElement};
use mifkit_core::rng::substream;
use mifkit_core::selftest::random_poly;

const BASES: [u64; 3] = [2, 3, 6];
const PRIMES: [u64; 5] = [5, 7, 11, 13, 101];

fn polys(seed: u64, n: u64, t: usize) -> (RingElement, RingElement, RingElement) {
    let ctx = RingCtx::with_vars(n, t).unwrap();
    let mut rng = substream(seed, 0);
    let mut draw = || random_poly(&ctx, 4, 3, 5, &mut rng);
    (draw(), draw(), draw())
}

fn groups() -> [GroupSpec; 3] {
    [free_pair(), family(), block_diagonal()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), bi in 0usize..3, t in 0usize..3) {
        let (a, b, c) = polys(seed, BASES[bi], t);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&(-&a) + &b, &b - &a);
        prop_assert_eq!(a.pow(2), &a * &a);
    }

    #[test]
    fn reduction_mod_p_is_a_ring_map(seed in any::<u64>(), bi in 0usize..3, t in 0usize..3, pi in 0usize..5) {
        let (n, p) = (BASES[bi], PRIMES[pi]);
        prop_assume!(n % p != 0);
        let (a, b, _) = polys(seed, n, t);
        let mut rng = substream(seed, 1);
        let point: Vec<u64> = (0..t).map(|_| rng.random_range(0..p)).collect();
        let ev = |r: &RingElement| r.eval_mod_p(p, &point).unwrap();
        prop_assert_eq!(ev(&(&a + &b)), (ev(&a) + ev(&b)) % p);
        prop_assert_eq!(ev(&(&a * &b)), ev(&a) * ev(&b) % p);
        prop_assert_eq!(ev(&(-&a)), (p - ev(&a)) % p);
    }

    #[test]
    fn group_words_multiply(seed in any::<u64>(), gi in 0usize..3, k1 in 0usize..10, k2 in 0usize..10) {
        let spec = &groups()[gi];
        let mut rng = substream(seed, 2);
        let g = random_element(spec, k1, &mut rng);
        let h = random_element(spec, k2, &mut rng);
        let gh = g.mul(&h).unwrap();
        prop_assert_eq!(gh.mat(), &g.mat().mul(h.mat()).unwrap());
        prop_assert!(gh.word_length().unwrap() <= k1 + k2);
        prop_assert!(g.mul(&g.inverse()).unwrap().is_identity());
        prop_assert!(gh.mat().det().is_one());
        let inv = g.inverse();
        prop_assert_eq!(&g.mat().inverse().unwrap(), inv.mat());
    }

    #[test]
    fn specialization_is_a_homomorphism(seed in any::<u64>(), gi in 0usize..3, pi in 0usize..5) {
        let spec = &groups()[gi];
        let p = PRIMES[pi];
        let mut rng = substream(seed, 3);
        let point: Vec<u64> = (0..spec.ctx().t()).map(|_| rng.random_range(0..p)).collect();
        let phi = Specialization::new(p, point, spec).unwrap();
        let g = random_element(spec, 8, &mut rng);
        let h = random_element(spec, 8, &mut rng);
        let (gp, hp) = (reduce_matrix(g.mat(), &phi).unwrap(), reduce_matrix(h.mat(), &phi).unwrap());
        prop_assert_eq!(reduce_matrix(g.mul(&h).unwrap().mat(), &phi).unwrap(), gp.mul(&hp));
        prop_assert_eq!(gp.det(), 1);
        prop_assert!(gp.mul(&gp.inverse()).is_identity());
        let images = LetterImages::new(spec, &phi).unwrap();
        prop_assert_eq!(images.word(g.word().unwrap()), gp);
    }

    #[test]
    fn mixed_word_group_laws(seed in any::<u64>(), gi in 0usize..3, n1 in 1usize..12, n2 in 1usize..12) {
        let spec = &groups()[gi];
        let mut rng = substream(seed, 4);
        let u = random_word(spec, n1, &mut rng).unwrap();
        let v = random_word(spec, n2, &mut rng).unwrap();
        let uv = u.mul(&v);
        prop_assert!(u.mul(&u.inverse()).is_trivial());
        prop_assert_eq!(u.inverse().inverse(), u.clone());
        prop_assert_eq!(uv.inverse(), v.inverse().mul(&u.inverse()));
        prop_assert_eq!(&uv.mul(&u), &u.mul(&v.mul(&u)));
        prop_assert!(uv.length() <= u.length() + v.length());
        prop_assert_eq!(MixedWord::parse(&u.to_string_with(spec), spec).unwrap(), u.clone());

        let gamma = random_element(spec, 6, &mut rng);
        let lhs = uv.evaluate(&gamma).unwrap();
        let rhs = u.evaluate(&gamma).unwrap().mul(&v.evaluate(&gamma).unwrap()).unwrap();
        prop_assert!(lhs.same_matrix(&rhs));
    }

    #[test]
    fn evaluation_commutes_with_reduction(seed in any::<u64>(), gi in 0usize..3, n in 1usize..10, pi in 0usize..5) {
        let spec = &groups()[gi];
        let p = PRIMES[pi];
        let mut rng = substream(seed, 5);
        let w = random_word(spec, n, &mut rng).unwrap();
        let gamma = random_element(spec, 5, &mut rng);
        let point: Vec<u64> = (0..spec.ctx().t()).map(|_| rng.random_range(0..p)).collect();
        let phi = Specialization::new(p, point, spec).unwrap();
        let images = LetterImages::new(spec, &phi).unwrap();
        let exact = reduce_matrix(w.evaluate(&gamma).unwrap().mat(), &phi).unwrap();
        let fast = w.evaluate_mod_p(&reduce_matrix(gamma.mat(), &phi).unwrap(), &images);
        prop_assert_eq!(exact, fast);
    }
}
