use serde::Serialize;

use super::word::MixedWord;
use crate::error::{Error, Result};
use crate::ring::GroupElement;

/// Conjugating element for one side of a commutator, in search order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conjugator {
    One,
    Sigma1,
    Sigma2,
    X,
    XInv,
}

const CANDIDATES: [Conjugator; 5] =
    [Conjugator::One, Conjugator::Sigma1, Conjugator::Sigma2, Conjugator::X, Conjugator::XInv];

struct Alphas {
    words: [MixedWord; 5],
}

impl Alphas {
    fn new(s1: &GroupElement, s2: &GroupElement) -> Result<Self> {
        if s1.is_identity() || s2.is_identity() || s1.same_matrix(s2) {
            return Err(Error::InvalidArgument("σ1, σ2 must be distinct and nontrivial".into()));
        }
        Ok(Alphas {
            words: [
                MixedWord::identity(),
                MixedWord::constant(s1.clone())?,
                MixedWord::constant(s2.clone())?,
                MixedWord::x(),
                MixedWord::x_pow(-1),
            ],
        })
    }

    fn get(&self, c: Conjugator) -> &MixedWord {
        &self.words[c as usize]
    }

    fn pair(&self, w1: &MixedWord, w2: &MixedWord) -> Result<(MixedWord, Conjugator, Conjugator)> {
        if w1.is_trivial() || w2.is_trivial() {
            return Err(Error::TrivialWord);
        }
        for a1 in CANDIDATES {
            let u = w1.conjugate(self.get(a1));
            for a2 in CANDIDATES {
                let c = MixedWord::commutator(&u, &w2.conjugate(self.get(a2)));
                if !c.is_trivial() {
                    return Ok((c, a1, a2));
                }
            }
        }
        // the lemma rules this out for groups with more than two elements
        Err(Error::Consistency("no conjugator pair gives a nontrivial commutator".into()))
    }
}

/// `[w1^α1, w2^α2]` for the first pair `(α1, α2)` in the order
/// `(1, σ1, σ2, x, x⁻¹)²` whose commutator is nontrivial; `w^α = α⁻¹ w α`.
pub fn combine_pair(
    w1: &MixedWord,
    w2: &MixedWord,
    s1: &GroupElement,
    s2: &GroupElement,
) -> Result<(MixedWord, Conjugator, Conjugator)> {
    Alphas::new(s1, s2)?.pair(w1, w2)
}

/// Length and participation bookkeeping for [`combine_all`].
#[derive(Clone, Debug, Serialize)]
pub struct CombineAudit {
    /// Number of input words.
    pub k: usize,
    /// Longest input word.
    pub n: usize,
    /// Rounds of pairing, `ceil(log2 k)`.
    pub rounds: u32,
    pub length: usize,
    /// `n * max(1, 2 m k^2)`.
    pub bound: u128,
    pub within_bound: bool,
    /// How many copies of each input the final word contains.
    pub participation: Vec<u64>,
    pub max_participation: u64,
    /// Whether every input participates at most `k` times.
    pub participation_within_k: bool,
    /// Conjugator choices, per round and pair.
    pub choices: Vec<Vec<(Conjugator, Conjugator)>>,
}

#[derive(Clone, Debug)]
pub struct Combined {
    pub word: MixedWord,
    pub audit: CombineAudit,
}

/// Pairs words into commutators round by round (an odd last word passes
/// through) until one word `W` remains. Any `γ` with `W(γ) != 1` has
/// `w_i(γ) != 1` for every input.
pub fn combine_all(words: &[MixedWord], s1: &GroupElement, s2: &GroupElement) -> Result<Combined> {
    if words.is_empty() {
        return Err(Error::InvalidArgument("no words to combine".into()));
    }
    if words.iter().any(MixedWord::is_trivial) {
        return Err(Error::TrivialWord);
    }
    let alphas = Alphas::new(s1, s2)?;
    let k = words.len();
    let n = words.iter().map(MixedWord::length).max().unwrap_or(0);
    let mut participation = vec![1u64; k];
    let mut level: Vec<(MixedWord, Vec<usize>)> =
        words.iter().cloned().enumerate().map(|(i, w)| (w, vec![i])).collect();
    let mut rounds = 0u32;
    let mut choices = Vec::new();
    while level.len() > 1 {
        rounds += 1;
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut picked = Vec::new();
        let mut it = level.into_iter();
        while let Some((u, mut iu)) = it.next() {
            match it.next() {
                Some((v, iv)) => {
                    let (c, a1, a2) = alphas.pair(&u, &v)?;
                    picked.push((a1, a2));
                    iu.extend(iv);
                    for &i in &iu {
                        participation[i] *= 2;
                    }
                    next.push((c, iu));
                }
                None => next.push((u, iu)),
            }
        }
        choices.push(picked);
        level = next;
    }
    let word = level.pop().expect("one word left").0;
    let length = word.length();
    let m = rounds as u128;
    let bound = n as u128 * (2 * m * (k as u128).pow(2)).max(1);
    let max_participation = participation.iter().copied().max().unwrap_or(0);
    let audit = CombineAudit {
        k,
        n,
        rounds,
        length,
        bound,
        within_bound: length as u128 <= bound,
        participation_within_k: max_participation <= k as u64,
        max_participation,
        participation,
        choices,
    };
    Ok(Combined { word, audit })
}
