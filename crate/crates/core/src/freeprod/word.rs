use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::modp::{FpMatrix, LetterImages};
use crate::ring::{power_token, GroupElement, GroupSpec, Letter};

/// One syllable of an element of `Γ * <x>`.
#[derive(Clone, Debug)]
pub enum Syllable {
    /// A group constant, always built from a generator word.
    Gamma(Arc<GroupElement>),
    /// A power of the variable.
    X(i64),
}

impl Syllable {
    pub fn gamma(g: GroupElement) -> Result<Self> {
        if g.word().is_none() {
            return Err(Error::NoWord);
        }
        Ok(Syllable::Gamma(Arc::new(g)))
    }

    fn is_trivial(&self) -> bool {
        match self {
            Syllable::Gamma(g) => g.is_identity(),
            Syllable::X(e) => *e == 0,
        }
    }

    /// Word length of a constant, `|e|` for `x^e`.
    pub fn length(&self) -> usize {
        match self {
            Syllable::Gamma(g) => g.word().map_or(0, <[Letter]>::len),
            Syllable::X(e) => e.unsigned_abs() as usize,
        }
    }
}

impl PartialEq for Syllable {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Syllable::Gamma(a), Syllable::Gamma(b)) => Arc::ptr_eq(a, b) || a.same_matrix(b),
            (Syllable::X(a), Syllable::X(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Syllable {}

impl Hash for Syllable {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Syllable::Gamma(g) => {
                0u8.hash(state);
                g.mat().hash(state);
            }
            Syllable::X(e) => {
                1u8.hash(state);
                e.hash(state);
            }
        }
    }
}

/// A reduced element of `Γ * <x>`: syllables alternate in kind and none is
/// trivial. Every constructor reduces, so two words are equal in the free
/// product exactly when their syllable lists agree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MixedWord {
    syllables: Vec<Syllable>,
}

/// Appends `s` to a reduced syllable stack, merging with the top if needed.
fn push(stack: &mut Vec<Syllable>, s: Syllable) {
    if s.is_trivial() {
        return;
    }
    let merged = match (stack.last(), &s) {
        (Some(Syllable::X(a)), Syllable::X(b)) => Syllable::X(a + b),
        (Some(Syllable::Gamma(a)), Syllable::Gamma(b)) => {
            Syllable::Gamma(Arc::new(a.mul(b).expect("constants share the spec dimension")))
        }
        _ => {
            stack.push(s);
            return;
        }
    };
    stack.pop();
    if !merged.is_trivial() {
        stack.push(merged);
    }
}

/// Reduced form of an arbitrary syllable sequence.
pub fn reduce(syllables: &[Syllable]) -> MixedWord {
    let mut stack = Vec::with_capacity(syllables.len());
    for s in syllables {
        push(&mut stack, s.clone());
    }
    MixedWord { syllables: stack }
}

impl MixedWord {
    pub fn identity() -> Self {
        MixedWord::default()
    }

    pub fn x_pow(e: i64) -> Self {
        reduce(&[Syllable::X(e)])
    }

    pub fn x() -> Self {
        Self::x_pow(1)
    }

    /// The constant `g`; `g` must carry a generator word.
    pub fn constant(g: GroupElement) -> Result<Self> {
        Ok(reduce(&[Syllable::gamma(g)?]))
    }

    pub fn letter(spec: &GroupSpec, l: Letter) -> Self {
        reduce(&[Syllable::Gamma(Arc::new(spec.letter_element(l)))])
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_trivial(&self) -> bool {
        self.syllables.is_empty()
    }

    /// `‖w‖`: constant word lengths plus absolute `x`-exponents.
    pub fn length(&self) -> usize {
        self.syllables.iter().map(Syllable::length).sum()
    }

    /// True when `x` occurs, i.e. the word is not a constant.
    pub fn involves_x(&self) -> bool {
        self.syllables.iter().any(|s| matches!(s, Syllable::X(_)))
    }

    pub fn mul(&self, other: &MixedWord) -> MixedWord {
        let mut stack = Vec::with_capacity(self.syllables.len() + other.syllables.len());
        stack.extend(self.syllables.iter().cloned());
        let mut rest = other.syllables.iter();
        // only the seam can merge; once a syllable is appended without
        // merging, the remainder is already alternating
        for s in rest.by_ref() {
            let before = stack.len();
            let appended = !matches!(
                (stack.last(), s),
                (Some(Syllable::X(_)), Syllable::X(_)) | (Some(Syllable::Gamma(_)), Syllable::Gamma(_))
            );
            push(&mut stack, s.clone());
            if appended && stack.len() == before + 1 {
                break;
            }
        }
        stack.extend(rest.cloned());
        MixedWord { syllables: stack }
    }

    pub fn inverse(&self) -> MixedWord {
        // constants shared between copies are inverted once
        let mut cache: HashMap<*const GroupElement, Arc<GroupElement>> = HashMap::new();
        let syllables = self
            .syllables
            .iter()
            .rev()
            .map(|s| match s {
                Syllable::X(e) => Syllable::X(-e),
                Syllable::Gamma(g) => Syllable::Gamma(
                    cache.entry(Arc::as_ptr(g)).or_insert_with(|| Arc::new(g.inverse())).clone(),
                ),
            })
            .collect();
        MixedWord { syllables }
    }

    /// `α⁻¹ w α`.
    pub fn conjugate(&self, alpha: &MixedWord) -> MixedWord {
        alpha.inverse().mul(self).mul(alpha)
    }

    /// `[u, v] = u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &MixedWord, v: &MixedWord) -> MixedWord {
        u.mul(v).mul(&u.inverse()).mul(&v.inverse())
    }

    pub fn pow(&self, e: u32) -> MixedWord {
        let mut acc = MixedWord::identity();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Parses whitespace-separated tokens `name` or `name^e`, `x` being the
    /// variable, and reduces.
    pub fn parse(text: &str, spec: &GroupSpec) -> Result<MixedWord> {
        let mut stack = Vec::new();
        for tok in text.split_whitespace() {
            let (name, e) = match tok.split_once('^') {
                Some((name, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::Parse(format!("malformed exponent in token {tok:?}")))?;
                    (name, e)
                }
                None => (tok, 1),
            };
            if name == "x" {
                push(&mut stack, Syllable::X(e));
                continue;
            }
            let g = spec.generator_index(name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            let l = Letter::new(g, e < 0);
            let word = vec![l; e.unsigned_abs() as usize];
            push(&mut stack, Syllable::Gamma(Arc::new(spec.element(&word))));
        }
        Ok(MixedWord { syllables: stack })
    }

    /// Inverse of [`MixedWord::parse`] on reduced words; runs of one letter
    /// are written as powers.
    pub fn to_string_with(&self, spec: &GroupSpec) -> String {
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|s| match s {
                Syllable::X(e) => power_token("x", *e),
                Syllable::Gamma(g) => spec.word_to_string(g.word().expect("constants carry words")),
            })
            .collect();
        parts.join(" ")
    }

    /// `w(γ)`, multiplying left to right.
    pub fn evaluate(&self, gamma: &GroupElement) -> Result<GroupElement> {
        let mut acc = match self.syllables.first() {
            Some(Syllable::Gamma(g)) => identity_like(g),
            _ => identity_like(gamma),
        };
        for s in &self.syllables {
            match s {
                Syllable::Gamma(g) => acc.mul_assign(g)?,
                Syllable::X(e) => acc.mul_assign(&gamma.pow(*e)?)?,
            }
        }
        Ok(acc)
    }

    /// `w(γ)` multiplied right to left, an independent check on [`Self::evaluate`].
    pub fn evaluate_reversed(&self, gamma: &GroupElement) -> Result<GroupElement> {
        let mut acc = identity_like(gamma);
        for s in self.syllables.iter().rev() {
            acc = match s {
                Syllable::Gamma(g) => g.mul(&acc)?,
                Syllable::X(e) => gamma.pow(*e)?.mul(&acc)?,
            };
        }
        Ok(acc)
    }

    /// Image of `w(γ)` in `SL_d(F_p)` given the image `gamma_p` of `γ`.
    pub fn evaluate_mod_p(&self, gamma_p: &FpMatrix, images: &LetterImages) -> FpMatrix {
        let gamma_inv = gamma_p.inverse();
        let mut acc = FpMatrix::identity(gamma_p.dim(), gamma_p.p());
        for s in &self.syllables {
            match s {
                Syllable::Gamma(g) => {
                    for &l in g.word().expect("constants carry words") {
                        acc = acc.mul(images.of(l));
                    }
                }
                Syllable::X(e) => {
                    let base = if *e < 0 { &gamma_inv } else { gamma_p };
                    acc = acc.mul(&fp_pow(base, e.unsigned_abs()));
                }
            }
        }
        acc
    }
}

fn identity_like(g: &GroupElement) -> GroupElement {
    g.mul(&g.inverse()).expect("same dimension")
}

pub fn fp_pow(base: &FpMatrix, mut e: u64) -> FpMatrix {
    let mut acc = FpMatrix::identity(base.dim(), base.p());
    let mut sq = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&sq);
        }
        e >>= 1;
        if e > 0 {
            sq = sq.mul(&sq);
        }
    }
    acc
}
