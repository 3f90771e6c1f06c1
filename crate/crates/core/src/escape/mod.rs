//! Witnesses `γ` with `w(γ) ≠ 1`: a Las Vegas search with logarithmic walk
//! length, an exact ball-search oracle for `f_X`, and a single witness for
//! every word up to a given length.

mod constants;
mod oracle;
mod sampler;

pub use constants::{default_probe_lengths, generic_evaluation, measure_constants, MeasuredConstants};
pub use oracle::{fx_oracle, OracleResult, MAX_ORACLE_RADIUS};
pub use sampler::{alphabet, enumerate_words, random_word, symbols_to_word, Symbol};

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Diagnostics, Error, Result};
use crate::freeprod::{combine_all, CombineAudit, MixedWord};
use crate::heights::HeightConstants;
use crate::modp::{sample_hom_with, FpMatrix, LetterImages, Specialization};
use crate::primes::is_prime;
use crate::ring::{GroupElement, GroupSpec, Letter};
use crate::rng::{stream_index, substream, AUX_STREAM_BASE};
use crate::walk::{linear_fit, walk_letters};

/// Exact evaluation is attempted only when `‖w‖ · k` is at most this.
pub const EXACT_BUDGET: usize = 50_000;

/// Extra primes from the window tried after a mod-p identity.
const EXTRA_PRIMES: usize = 2;

#[derive(Clone, Debug, Serialize)]
pub struct EscapeConfig {
    /// `k = ⌈c0 ln‖w‖⌉ + c0_prime`.
    pub c0: f64,
    pub c0_prime: u32,
    /// Prime-window multiplier `D`.
    pub d_mult: f64,
    pub retries: u32,
    pub max_doublings: u32,
    pub seed: u64,
}

impl EscapeConfig {
    pub fn new(c0: f64, d_mult: f64, seed: u64) -> Self {
        EscapeConfig { c0, c0_prime: 1, d_mult, retries: 16, max_doublings: 6, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0) || !(self.d_mult >= 1.0) || self.retries == 0 {
            return Err(Error::InvalidArgument(format!(
                "need c0 > 0, D >= 1, retries >= 1 (got {}, {}, {})",
                self.c0, self.d_mult, self.retries
            )));
        }
        Ok(())
    }

    pub fn walk_length(&self, norm: usize) -> usize {
        ((self.c0 * (norm.max(1) as f64).ln()).ceil() as usize + self.c0_prime as usize).max(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Certificate {
    /// Entry `entry` of `w(γ)` mod `p` at `point` is `value`, which differs
    /// from the identity's entry.
    ModP { p: u64, point: Vec<u64>, entry: (usize, usize), value: u64 },
    Exact { exact: bool },
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub gamma: GroupElement,
    pub length: usize,
    pub k_used: usize,
    pub certificate: Certificate,
    pub attempts: u64,
}

impl Witness {
    /// Re-checks the certificate independently of how it was found.
    pub fn verify(&self, spec: &GroupSpec, w: &MixedWord) -> Result<bool> {
        match &self.certificate {
            Certificate::ModP { p, point, entry, value } => {
                let phi = Specialization::new(*p, point.clone(), spec)?;
                let images = LetterImages::new(spec, &phi)?;
                let gp = images.word(self.gamma.word().ok_or(Error::NoWord)?);
                let img = w.evaluate_mod_p(&gp, &images);
                let diag = u64::from(entry.0 == entry.1);
                Ok(img.get(entry.0, entry.1) == *value && *value != diag)
            }
            Certificate::Exact { .. } => Ok(!w.evaluate_reversed(&self.gamma)?.is_identity()),
        }
    }

    pub fn to_json(&self, spec: &GroupSpec, w: &MixedWord) -> Value {
        json!({
            "word": w.to_string_with(spec),
            "gamma_word": spec.word_to_string(self.gamma.word().unwrap_or(&[])),
            "gamma_length": self.length,
            "k_used": self.k_used,
            "certificate": self.certificate,
            "attempts": self.attempts,
        })
    }
}

/// Specializations drawn from the prime window `(D‖w‖, D C_R ‖w‖]`, in
/// increasing order of prime.
struct PrimeWindow<'a> {
    spec: &'a GroupSpec,
    next: u64,
    hi: u64,
    rng: rand_chacha::ChaCha8Rng,
}

impl<'a> PrimeWindow<'a> {
    fn new(spec: &'a GroupSpec, norm: usize, d_mult: f64, seed: u64) -> Self {
        let c_r = HeightConstants::for_ctx(spec.ctx()).c_r;
        let lo = (d_mult * norm as f64).floor() as u64 + 1;
        let hi = (d_mult * c_r * norm as f64).floor() as u64;
        PrimeWindow { spec, next: lo, hi, rng: substream(seed, AUX_STREAM_BASE + 4) }
    }

    fn next_images(&mut self) -> Result<(Specialization, LetterImages)> {
        while self.next <= self.hi {
            let p = self.next;
            self.next += 1;
            if !is_prime(p) || self.spec.ctx().n() % p == 0 {
                continue;
            }
            match sample_hom_with(p, self.spec, &mut self.rng) {
                Ok(phi) => {
                    let images = LetterImages::new(self.spec, &phi)?;
                    return Ok((phi, images));
                }
                Err(Error::LocalizerVanishes { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::WindowExhausted(0))
    }
}

fn modp_certificate(w: &MixedWord, steps: &[Letter], phi: &Specialization, images: &LetterImages) -> Option<Certificate> {
    let img: FpMatrix = w.evaluate_mod_p(&images.word(steps), images);
    img.first_nonidentity_entry()
        .map(|(i, j, value)| Certificate::ModP { p: phi.p, point: phi.point.clone(), entry: (i, j), value })
}

/// Las Vegas search for `γ` with `w(γ) ≠ 1`: walks of length `k` from
/// [`EscapeConfig::walk_length`], certified mod a prime from the window, with
/// extra primes and then exact evaluation on a mod-p identity. After
/// `retries` failures `k` doubles. Attempt `a` at doubling `r` draws from
/// stream `(r, a)`, so the result is a function of the seed.
pub fn escape(spec: &GroupSpec, w: &MixedWord, cfg: &EscapeConfig) -> Result<Witness> {
    if w.is_trivial() {
        return Err(Error::TrivialWord);
    }
    if !spec.density_asserted() {
        return Err(Error::DensityNotAsserted);
    }
    cfg.validate()?;
    let norm = w.length();
    let mut window = PrimeWindow::new(spec, norm, cfg.d_mult, cfg.seed);
    let mut primes = vec![window.next_images()?];
    let mut diag = Diagnostics { primes_tried: vec![primes[0].0.p], ..Default::default() };
    let mut k = cfg.walk_length(norm);
    for round in 0..=cfg.max_doublings {
        diag.k_reached = k;
        for a in 0..cfg.retries as u64 {
            diag.attempts += 1;
            let mut rng = substream(cfg.seed, stream_index(round as u64, a));
            let steps = walk_letters(spec, k, 0.0, &mut rng);
            let mut cert = None;
            for extra in 0..=EXTRA_PRIMES {
                if extra == primes.len() {
                    match window.next_images() {
                        Ok(next) => {
                            diag.primes_tried.push(next.0.p);
                            primes.push(next);
                        }
                        Err(_) => break,
                    }
                }
                let (phi, images) = &primes[extra];
                cert = modp_certificate(w, &steps, phi, images);
                if cert.is_some() {
                    break;
                }
                if extra == 0 {
                    diag.modp_identity_hits += 1;
                }
            }
            if cert.is_none() && norm.saturating_mul(k) <= EXACT_BUDGET {
                let gamma = spec.element(&steps);
                if w.evaluate(&gamma)?.is_identity() {
                    diag.exact_identity_hits += 1;
                } else {
                    cert = Some(Certificate::Exact { exact: true });
                }
            }
            if let Some(certificate) = cert {
                let gamma = spec.element(&steps);
                let length = gamma.word().map_or(0, <[Letter]>::len);
                return Ok(Witness { gamma, length, k_used: k, certificate, attempts: diag.attempts });
            }
        }
        k *= 2;
    }
    Err(Error::BudgetExhausted(Box::new(diag)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub c0: f64,
    /// `(‖w‖, smallest doubling k with success rate ≥ 1/2)` per probe.
    pub probes: Vec<(usize, usize)>,
}

/// Lengths of the probe words used by [`calibrate_c0`].
pub const CALIBRATION_LENGTHS: [usize; 3] = [8, 16, 32];

/// Smallest `k` in `1, 2, 4, …` at which at least half of `trials` walks
/// escape each probe word; `c0` is the largest `k / ln‖w‖`.
pub fn calibrate_c0(spec: &GroupSpec, d_mult: f64, per_length: usize, trials: u64, seed: u64) -> Result<Calibration> {
    let mut rng = substream(seed, AUX_STREAM_BASE + 5);
    let mut probes = Vec::new();
    let mut c0 = 0.0f64;
    for &len in &CALIBRATION_LENGTHS {
        for _ in 0..per_length {
            let w = random_word(spec, len, &mut rng)?;
            let norm = w.length();
            let mut window = PrimeWindow::new(spec, norm, d_mult, seed);
            let (phi, images) = window.next_images()?;
            let mut k = 1usize;
            loop {
                let mut ok = 0;
                for i in 0..trials {
                    let mut r = substream(seed, stream_index(k as u64, i));
                    let steps = walk_letters(spec, k, 0.0, &mut r);
                    let escaped = modp_certificate(&w, &steps, &phi, &images).is_some()
                        || (norm * k <= EXACT_BUDGET && !w.evaluate(&spec.element(&steps))?.is_identity());
                    ok += u64::from(escaped);
                }
                if 2 * ok >= trials {
                    break;
                }
                if k >= 1 << 12 {
                    return Err(Error::BudgetExhausted(Box::new(Diagnostics { k_reached: k, ..Default::default() })));
                }
                k *= 2;
            }
            probes.push((norm, k));
            c0 = c0.max(k as f64 / (norm as f64).ln());
        }
    }
    Ok(Calibration { c0, probes })
}

/// Measured constants and a calibrated `c0` for `spec`.
pub fn default_config(spec: &GroupSpec, seed: u64) -> Result<(EscapeConfig, MeasuredConstants, Calibration)> {
    let consts = measure_constants(spec, &default_probe_lengths(spec.d()), 4, seed)?;
    let d_mult = consts.window_multiplier();
    let cal = calibrate_c0(spec, d_mult, 4, 16, seed)?;
    Ok((EscapeConfig::new(cal.c0, d_mult, seed), consts, cal))
}

#[derive(Clone, Debug, Serialize)]
pub struct FxRow {
    pub n: usize,
    pub words: usize,
    pub max_witness_len: usize,
    pub mean_witness_len: f64,
    /// Largest oracle `f_X` among the words the oracle settled within its cap.
    pub oracle_fx_where_known: Option<usize>,
    pub oracle_words: usize,
    /// Words where the witness was shorter than the oracle value (always 0).
    pub oracle_violations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FxCurve {
    pub rows: Vec<FxRow>,
    /// Slope of `max_witness_len` against `ln n`.
    pub fitted_c: Option<f64>,
    pub invalid_witnesses: usize,
}

/// For each `n`, escapes `words_per_n` random words of length `n` and
/// compares against the oracle with radius `oracle_cap`.
pub fn fx_curve(
    spec: &GroupSpec,
    ns: &[usize],
    words_per_n: usize,
    oracle_cap: usize,
    cfg: &EscapeConfig,
) -> Result<FxCurve> {
    let mut rows = Vec::new();
    let mut invalid = 0;
    for (row, &n) in ns.iter().enumerate() {
        let mut rng = substream(cfg.seed, AUX_STREAM_BASE + 16 + row as u64);
        let (mut max_len, mut total) = (0usize, 0usize);
        let (mut known, mut oracle_words, mut violations) = (None, 0, 0);
        for i in 0..words_per_n {
            let w = random_word(spec, n, &mut rng)?;
            let sub = EscapeConfig { seed: cfg.seed.wrapping_add(((row as u64) << 32) | i as u64), ..cfg.clone() };
            let wit = escape(spec, &w, &sub)?;
            if !wit.verify(spec, &w)? {
                invalid += 1;
            }
            max_len = max_len.max(wit.length);
            total += wit.length;
            match fx_oracle(spec, &w, oracle_cap) {
                Ok(o) => {
                    oracle_words += 1;
                    known = Some(known.map_or(o.fx, |k: usize| k.max(o.fx)));
                    if wit.length < o.fx {
                        violations += 1;
                    }
                }
                Err(Error::BudgetExhausted(_)) => {}
                Err(e) => return Err(e),
            }
        }
        rows.push(FxRow {
            n,
            words: words_per_n,
            max_witness_len: max_len,
            mean_witness_len: total as f64 / words_per_n.max(1) as f64,
            oracle_fx_where_known: known,
            oracle_words,
            oracle_violations: violations,
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        rows.iter().filter(|r| r.n > 0).map(|r| ((r.n as f64).ln(), r.max_witness_len as f64)).unzip();
    Ok(FxCurve { fitted_c: linear_fit(&xs, &ys).map(|f| f.slope), rows, invalid_witnesses: invalid })
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiReport {
    pub n: usize,
    pub words: usize,
    pub combined_length: usize,
    pub audit: CombineAudit,
    pub verified: usize,
    pub witness_length: usize,
}

/// One `γ` with `w(γ) ≠ 1` for every nontrivial mixed word of length at
/// most `n`: enumerate, combine into one word, escape it, then check every
/// enumerated word directly.
pub fn phi_witness(spec: &GroupSpec, n: usize, cfg: &EscapeConfig) -> Result<(Witness, PhiReport)> {
    if n == 0 || n > 4 {
        return Err(Error::InvalidArgument(format!("n = {n} outside 1..=4")));
    }
    let words = enumerate_words(spec, n)?;
    let (l1, l2) = spec.sigma_pair()?;
    let combined = combine_all(&words, &spec.letter_element(l1), &spec.letter_element(l2))?;
    let witness = escape(spec, &combined.word, cfg)?;
    let mut verified = 0;
    for w in &words {
        if w.evaluate(&witness.gamma)?.is_identity() {
            return Err(Error::Consistency(format!(
                "{} vanishes at the combined witness",
                w.to_string_with(spec)
            )));
        }
        verified += 1;
    }
    let report = PhiReport {
        n,
        words: words.len(),
        combined_length: combined.word.length(),
        audit: combined.audit,
        verified,
        witness_length: witness.length,
    };
    Ok((witness, report))
}

/// A uniformly random reduced element given by a walk; handy for sampling.
pub fn random_element(spec: &GroupSpec, k: usize, rng: &mut impl Rng) -> GroupElement {
    spec.element(&walk_letters(spec, k, 0.0, rng))
}
