use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::freeprod::{reduce, MixedWord, Syllable};
use crate::ring::{GroupSpec, Letter};

/// A letter of `X ∪ {x, x⁻¹}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Gen(Letter),
    X(bool),
}

impl Symbol {
    fn cancels(self, next: Symbol) -> bool {
        match (self, next) {
            (Symbol::Gen(a), Symbol::Gen(b)) => a.inverse() == b,
            (Symbol::X(a), Symbol::X(b)) => a != b,
            _ => false,
        }
    }
}

pub fn alphabet(spec: &GroupSpec) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = spec.letters().into_iter().map(Symbol::Gen).collect();
    out.push(Symbol::X(false));
    out.push(Symbol::X(true));
    out
}

/// The mixed word spelled by `syms`, reduced.
pub fn symbols_to_word(spec: &GroupSpec, syms: &[Symbol]) -> Result<MixedWord> {
    let mut syllables = Vec::new();
    let mut run: Vec<Letter> = Vec::new();
    for &s in syms {
        match s {
            Symbol::Gen(l) => run.push(l),
            Symbol::X(inv) => {
                if !run.is_empty() {
                    syllables.push(Syllable::gamma(spec.element(&run))?);
                    run.clear();
                }
                syllables.push(Syllable::X(if inv { -1 } else { 1 }));
            }
        }
    }
    if !run.is_empty() {
        syllables.push(Syllable::gamma(spec.element(&run))?);
    }
    Ok(reduce(&syllables))
}

/// A uniformly random freely reduced spelling of length `n`, resampled
/// until the mixed word it spells is nontrivial.
pub fn random_word(spec: &GroupSpec, n: usize, rng: &mut impl Rng) -> Result<MixedWord> {
    if n == 0 {
        return Err(Error::TrivialWord);
    }
    let alpha = alphabet(spec);
    for _ in 0..1000 {
        let mut syms: Vec<Symbol> = Vec::with_capacity(n);
        while syms.len() < n {
            let s = alpha[rng.random_range(0..alpha.len())];
            if syms.last().is_some_and(|&last| last.cancels(s)) {
                continue;
            }
            syms.push(s);
        }
        let w = symbols_to_word(spec, &syms)?;
        if !w.is_trivial() {
            return Ok(w);
        }
    }
    Err(Error::Consistency(format!("no nontrivial word of length {n} in 1000 draws")))
}

/// Every nontrivial mixed word spelled by a freely reduced string of length
/// at most `n`, deduplicated by reduced form, in order of first appearance.
pub fn enumerate_words(spec: &GroupSpec, n: usize) -> Result<Vec<MixedWord>> {
    let alpha = alphabet(spec);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Symbol>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for syms in &layer {
            for &s in &alpha {
                if syms.last().is_some_and(|&last| last.cancels(s)) {
                    continue;
                }
                let mut longer = syms.clone();
                longer.push(s);
                let w = symbols_to_word(spec, &longer)?;
                if !w.is_trivial() && seen.insert(w.clone()) {
                    out.push(w);
                }
                next.push(longer);
            }
        }
        layer = next;
    }
    Ok(out)
}
