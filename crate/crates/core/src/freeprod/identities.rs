use serde::Serialize;

use super::word::MixedWord;
use crate::error::{Error, Result};
use crate::ring::GroupElement;

/// Which mixed identity to build. The caller vouches for the group-theoretic
/// hypotheses; the factory only builds the word.
#[derive(Clone, Debug)]
pub enum IdentitySpec {
    /// `a` central: `[x, a]`.
    Central { a: GroupElement },
    /// `a` in a finite subgroup of order `order` whose normalizer has index
    /// `i` with `k = i!`: `[x^k, a]^order`.
    FiniteNormalized { a: GroupElement, k: u64, order: u32 },
    /// `a` in an abelian subgroup normalized by `x^k`: `[x^k a x^-k, a]`.
    InfiniteAbelianNormalized { a: GroupElement, k: u64 },
    /// `b` in a subgroup normalized by `x^k`, `c` centralizing it: `[x^k b x^-k, c]`.
    Centralized { b: GroupElement, c: GroupElement, k: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityKind {
    Central,
    FiniteNormalized,
    InfiniteAbelianNormalized,
    Centralized,
}

impl IdentitySpec {
    pub fn kind(&self) -> IdentityKind {
        match self {
            IdentitySpec::Central { .. } => IdentityKind::Central,
            IdentitySpec::FiniteNormalized { .. } => IdentityKind::FiniteNormalized,
            IdentitySpec::InfiniteAbelianNormalized { .. } => IdentityKind::InfiniteAbelianNormalized,
            IdentitySpec::Centralized { .. } => IdentityKind::Centralized,
        }
    }
}

fn nontrivial(g: &GroupElement, what: &str) -> Result<MixedWord> {
    if g.is_identity() {
        return Err(Error::TrivialParameter(format!("{what} is the identity")));
    }
    MixedWord::constant(g.clone())
}

fn x_power(k: u64) -> Result<MixedWord> {
    if k == 0 {
        return Err(Error::TrivialParameter("k must be at least 1".into()));
    }
    let k = i64::try_from(k).map_err(|_| Error::InvalidArgument(format!("k = {k} too large")))?;
    Ok(MixedWord::x_pow(k))
}

/// Builds the reduced mixed word for the chosen identity.
pub fn identity_factory(spec: &IdentitySpec) -> Result<MixedWord> {
    match spec {
        IdentitySpec::Central { a } => Ok(MixedWord::commutator(&MixedWord::x(), &nontrivial(a, "a")?)),
        IdentitySpec::FiniteNormalized { a, k, order } => {
            if *order < 2 {
                return Err(Error::TrivialParameter(format!("order {order} of a nontrivial subgroup")));
            }
            let c = MixedWord::commutator(&x_power(*k)?, &nontrivial(a, "a")?);
            Ok(c.pow(*order))
        }
        IdentitySpec::InfiniteAbelianNormalized { a, k } => {
            let a = nontrivial(a, "a")?;
            let xk = x_power(*k)?;
            let conj = xk.mul(&a).mul(&xk.inverse());
            Ok(MixedWord::commutator(&conj, &a))
        }
        IdentitySpec::Centralized { b, c, k } => {
            let b = nontrivial(b, "b")?;
            let c = nontrivial(c, "c")?;
            let xk = x_power(*k)?;
            let conj = xk.mul(&b).mul(&xk.inverse());
            Ok(MixedWord::commutator(&conj, &c))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups as examples;
    use crate::ring::Letter;

    #[test]
    fn shapes() {
        let g = examples::with_minus_identity();
        let z = g.letter_element(Letter(3));
        let w = identity_factory(&IdentitySpec::Central { a: z.clone() }).unwrap();
        assert_eq!(w.to_string_with(&g), "x Z x^-1 Z^-1");
        let w = identity_factory(&IdentitySpec::FiniteNormalized { a: z.clone(), k: 2, order: 2 }).unwrap();
        assert_eq!(w.to_string_with(&g), "x^2 Z x^-2 Z^-1 x^2 Z x^-2 Z^-1");
        let a = g.letter_element(Letter(1));
        let w = identity_factory(&IdentitySpec::InfiniteAbelianNormalized { a: a.clone(), k: 1 }).unwrap();
        assert_eq!(w.to_string_with(&g), "x A x^-1 A x A^-1 x^-1 A^-1");
        let b = g.letter_element(Letter(2));
        let w = identity_factory(&IdentitySpec::Centralized { b: a.clone(), c: b, k: 3 }).unwrap();
        assert_eq!(w.to_string_with(&g), "x^3 A x^-3 B x^3 A^-1 x^-3 B^-1");
    }

    #[test]
    fn trivial_parameters_rejected() {
        let g = examples::with_minus_identity();
        let one = g.identity();
        assert!(matches!(
            identity_factory(&IdentitySpec::Central { a: one.clone() }),
            Err(Error::TrivialParameter(_))
        ));
        let a = g.letter_element(Letter(1));
        assert!(identity_factory(&IdentitySpec::InfiniteAbelianNormalized { a, k: 0 }).is_err());
        let z = g.letter_element(Letter(3));
        assert!(identity_factory(&IdentitySpec::FiniteNormalized { a: z, k: 1, order: 1 }).is_err());
    }

    #[test]
    fn central_identity_vanishes() {
        let g = examples::with_minus_identity();
        let w = identity_factory(&IdentitySpec::Central { a: g.letter_element(Letter(3)) }).unwrap();
        for word in [vec![Letter(1), Letter(2), Letter(-3)], vec![Letter(-2); 4], vec![]] {
            assert!(w.evaluate(&g.element(&word)).unwrap().is_identity());
        }
    }
}
