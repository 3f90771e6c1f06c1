//! The free product `Γ * <x>`: reduced words, evaluation, identities and the
//! commutator combiner.

mod combine;
mod identities;
mod word;

pub use combine::{combine_all, combine_pair, CombineAudit, Combined, Conjugator};
pub use identities::{identity_factory, IdentityKind, IdentitySpec};
pub use word::{fp_pow, reduce, MixedWord, Syllable};

