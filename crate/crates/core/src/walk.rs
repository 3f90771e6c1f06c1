//! Simple random walks on `Γ` and the empirical decay of `Pr(w(γ_k) = 1)`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freeprod::MixedWord;
use crate::modp::{sample_hom_with, LetterImages};
use crate::primes::is_prime;
use crate::ring::{GroupElement, GroupSpec, Letter};
use crate::rng::{stream_index, substream, AUX_STREAM_BASE};

/// Range the fast-path prime is drawn from.
pub const FAST_PRIME_RANGE: (u64, u64) = (1_000_000_000, 2_000_000_000);

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WalkConfig {
    pub steps: usize,
    pub trials: u64,
    pub seed: u64,
    /// Probability of holding still at each step.
    pub beta: f64,
}

impl WalkConfig {
    pub fn new(steps: usize, trials: u64, seed: u64) -> Self {
        WalkConfig { steps, trials, seed, beta: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::InvalidArgument(format!("hold probability {} outside [0, 1)", self.beta)));
        }
        Ok(())
    }
}

/// The unreduced step sequence of a lazy walk; held steps are omitted.
pub fn walk_letters(spec: &GroupSpec, steps: usize, beta: f64, rng: &mut impl Rng) -> Vec<Letter> {
    let letters = spec.letters();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        if beta > 0.0 && rng.random::<f64>() < beta {
            continue;
        }
        out.push(letters[rng.random_range(0..letters.len())]);
    }
    out
}

/// Walk for trial `trial` of `cfg`, on stream `(row 0, trial)`.
pub fn sample_walk(spec: &GroupSpec, cfg: &WalkConfig, trial: u64) -> Result<GroupElement> {
    cfg.validate()?;
    let mut rng = substream(cfg.seed, stream_index(0, trial));
    Ok(spec.element(&walk_letters(spec, cfg.steps, cfg.beta, &mut rng)))
}

/// Test of `w(γ) = 1` through one random specialization with a large
/// prime, confirmed exactly whenever the image is the identity.
pub struct IdentityTester<'a> {
    spec: &'a GroupSpec,
    word: &'a MixedWord,
    images: LetterImages,
}

impl<'a> IdentityTester<'a> {
    pub fn new(spec: &'a GroupSpec, word: &'a MixedWord, seed: u64) -> Result<Self> {
        let mut rng = substream(seed, AUX_STREAM_BASE + 2);
        let phi = loop {
            let p = rng.random_range(FAST_PRIME_RANGE.0..FAST_PRIME_RANGE.1);
            if !is_prime(p) || spec.ctx().n() % p == 0 {
                continue;
            }
            match sample_hom_with(p, spec, &mut rng) {
                Ok(phi) => break phi,
                Err(Error::LocalizerVanishes { .. }) => continue,
                Err(e) => return Err(e),
            }
        };
        Ok(IdentityTester { spec, word, images: LetterImages::new(spec, &phi)? })
    }

    pub fn p(&self) -> u64 {
        self.images.p()
    }

    /// `(exactly identity, needed exact evaluation)`.
    pub fn is_identity(&self, steps: &[Letter]) -> Result<(bool, bool)> {
        let gamma_p = self.images.word(steps);
        if !self.word.evaluate_mod_p(&gamma_p, &self.images).is_identity() {
            return Ok((false, false));
        }
        let gamma = self.spec.element(steps);
        Ok((self.word.evaluate(&gamma)?.is_identity(), true))
    }
}

/// Wilson score interval at 95%.
pub fn wilson95(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (h, n) = (hits as f64, n as f64);
    let phat = h / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if hits as f64 == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub k: usize,
    pub hits: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub lo95: f64,
    pub hi95: f64,
}

/// Least squares `y = slope·x + intercept`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit { slope, intercept: my - slope * mx, r2, points: n })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayCurve {
    pub rows: Vec<DecayRow>,
    /// Fit of `ln p_hat` against `k` over rows with at least one hit.
    pub fit: Option<LinearFit>,
    pub prime: u64,
    /// Trials whose mod-p image was the identity and went to exact evaluation.
    pub exact_checks: u64,
}

/// Empirical `Pr(w(γ_k) = 1)` for each `k`; trial `i` at length `k` uses
/// stream `(k, i)`, so results do not depend on the thread count.
pub fn decay_curve(
    spec: &GroupSpec,
    w: &MixedWord,
    ks: &[usize],
    trials: u64,
    seed: u64,
    beta: f64,
) -> Result<DecayCurve> {
    if w.is_trivial() {
        return Err(Error::TrivialWord);
    }
    WalkConfig { steps: 0, trials, seed, beta }.validate()?;
    let tester = IdentityTester::new(spec, w, seed)?;
    let mut rows = Vec::with_capacity(ks.len());
    let mut exact_checks = 0;
    for &k in ks {
        let (hits, checks) = (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, stream_index(k as u64, i));
                let steps = walk_letters(spec, k, beta, &mut rng);
                tester.is_identity(&steps).map(|(id, ex)| (u64::from(id), u64::from(ex)))
            })
            .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
        exact_checks += checks;
        let (lo95, hi95) = wilson95(hits, trials);
        rows.push(DecayRow { k, hits, trials, p_hat: hits as f64 / trials as f64, lo95, hi95 });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        rows.iter().filter(|r| r.hits > 0).map(|r| (r.k as f64, r.p_hat.ln())).unzip();
    Ok(DecayCurve { fit: linear_fit(&xs, &ys), rows, prime: tester.p(), exact_checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::free_pair;

    #[test]
    fn zero_and_one_steps() {
        let spec = free_pair();
        let g = sample_walk(&spec, &WalkConfig::new(0, 1, 1), 0).unwrap();
        assert!(g.is_identity());
        assert_eq!(g.word().unwrap().len(), 0);
        let mut counts = [0u64; 4];
        let n = 10_000;
        for i in 0..n {
            let g = sample_walk(&spec, &WalkConfig::new(1, n, 7), i).unwrap();
            let l = g.word().unwrap()[0];
            counts[2 * l.generator() + usize::from(l.is_inverse())] += 1;
        }
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 / 4.0).abs() < 4.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn trace_reproduces_matrix() {
        let spec = free_pair();
        let mut rng = substream(3, 0);
        let steps = walk_letters(&spec, 15, 0.0, &mut rng);
        let g = spec.element(&steps);
        let mut acc = spec.identity();
        for &l in &steps {
            acc = acc.mul(&spec.letter_element(l)).unwrap();
        }
        assert!(acc.same_matrix(&g));
        assert!(spec.element(g.word().unwrap()).same_matrix(&g));
    }

    #[test]
    fn lazy_walk_holds() {
        let spec = free_pair();
        let mut rng = substream(5, 0);
        let total: usize = (0..200).map(|_| walk_letters(&spec, 10, 0.5, &mut rng).len()).sum();
        assert!((800..1200).contains(&total));
        assert!(WalkConfig { beta: 1.0, ..WalkConfig::new(1, 1, 0) }.validate().is_err());
    }

    #[test]
    fn wilson_interval() {
        let (lo, hi) = wilson95(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036_994).abs() < 1e-5);
        let (lo, hi) = wilson95(50, 100);
        assert!((lo - 0.403_832).abs() < 1e-5 && (hi - 0.596_168).abs() < 1e-5);
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 - 2.0 * x).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12 && (f.intercept - 0.5).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn decay_small_run() {
        let spec = free_pair();
        let w = MixedWord::parse("A x A^-1 x^-1", &spec).unwrap();
        let c = decay_curve(&spec, &w, &[0, 1, 2, 4], 400, 42, 0.0).unwrap();
        assert_eq!(c.rows[0].hits, 400);
        // k = 1: only A^{±1} commute with A
        let r1 = c.rows[1].p_hat;
        assert!((r1 - 0.5).abs() < 0.1, "{r1}");
        assert!(c.rows[3].p_hat < r1);
        assert!(c.exact_checks >= c.rows.iter().map(|r| r.hits).sum::<u64>());
        let again = decay_curve(&spec, &w, &[0, 1, 2, 4], 400, 42, 0.0).unwrap();
        assert_eq!(
            c.rows.iter().map(|r| r.hits).collect::<Vec<_>>(),
            again.rows.iter().map(|r| r.hits).collect::<Vec<_>>()
        );
        assert!(matches!(
            decay_curve(&spec, &MixedWord::identity(), &[1], 10, 1, 0.0),
            Err(Error::TrivialWord)
        ));
    }

    #[test]
    fn fast_path_is_sound() {
        let spec = free_pair();
        let w = MixedWord::parse("A x A^-1 x^-1", &spec).unwrap();
        let t = IdentityTester::new(&spec, &w, 9).unwrap();
        assert!(t.p() >= FAST_PRIME_RANGE.0 && t.p() < FAST_PRIME_RANGE.1);
        let mut rng = substream(9, 1);
        for _ in 0..200 {
            let steps = walk_letters(&spec, 6, 0.0, &mut rng);
            let (fast, _) = t.is_identity(&steps).unwrap();
            let exact = w.evaluate(&spec.element(&steps)).unwrap().is_identity();
            assert_eq!(fast, exact);
        }
    }
}
