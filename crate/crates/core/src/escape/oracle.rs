use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::freeprod::MixedWord;
use crate::ring::{GroupElement, GroupSpec, Mat};
use crate::walk::IdentityTester;

/// Largest radius the ball search accepts.
pub const MAX_ORACLE_RADIUS: usize = 15;

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    /// `f_X(w)`: the word-metric radius of the first ball holding a witness.
    pub fx: usize,
    #[serde(skip)]
    pub gamma: GroupElement,
    /// Elements tested before the witness was found.
    pub visited: usize,
}

/// Exact `f_X(w) = min {‖γ‖ : w(γ) ≠ 1}` by breadth-first search over the
/// Cayley graph of `Γ`; elements are deduplicated by matrix, so each is
/// visited at its true word length.
pub fn fx_oracle(spec: &GroupSpec, w: &MixedWord, radius_cap: usize) -> Result<OracleResult> {
    if w.is_trivial() {
        return Err(Error::TrivialWord);
    }
    if radius_cap > MAX_ORACLE_RADIUS {
        return Err(Error::InvalidArgument(format!("radius cap {radius_cap} exceeds {MAX_ORACLE_RADIUS}")));
    }
    let tester = IdentityTester::new(spec, w, 0)?;
    let letters = spec.letters();
    let id = spec.identity();
    let mut seen: HashSet<Mat> = HashSet::from([id.mat().clone()]);
    let mut layer = vec![id];
    let mut visited = 0;
    for radius in 0..=radius_cap {
        for g in &layer {
            visited += 1;
            if !tester.is_identity(g.word().expect("built from letters"))?.0 {
                return Ok(OracleResult { fx: radius, gamma: g.clone(), visited });
            }
        }
        if radius == radius_cap {
            break;
        }
        let mut next = Vec::new();
        for g in &layer {
            for &l in &letters {
                let h = g.mul(&spec.letter_element(l))?;
                if seen.insert(h.mat().clone()) {
                    next.push(h);
                }
            }
        }
        layer = next;
    }
    Err(Error::BudgetExhausted(Box::new(crate::error::Diagnostics {
        attempts: visited as u64,
        k_reached: radius_cap,
        ..Default::default()
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{free_pair, with_minus_identity};
    use crate::ring::Letter;

    fn w(s: &str) -> MixedWord {
        MixedWord::parse(s, &free_pair()).unwrap()
    }

    #[test]
    fn small_values() {
        let spec = free_pair();
        assert_eq!(fx_oracle(&spec, &w("x"), 3).unwrap().fx, 1);
        let r = fx_oracle(&spec, &w("A x A^-1 x^-1"), 3).unwrap();
        assert_eq!(r.fx, 1);
        // A and A^-1 commute with A; the first witness in BFS order is B
        assert_eq!(r.gamma.word().unwrap(), &[Letter(2)]);
        assert_eq!(fx_oracle(&spec, &w("A"), 3).unwrap().fx, 0);
        // [x^2, A]: x = B works at radius 1
        assert_eq!(fx_oracle(&spec, &w("x^2 A x^-2 A^-1"), 3).unwrap().fx, 1);
    }

    #[test]
    fn identities_exhaust_the_ball() {
        let g = with_minus_identity();
        let z = MixedWord::letter(&g, Letter(3));
        let central = MixedWord::commutator(&MixedWord::x(), &z);
        assert!(matches!(fx_oracle(&g, &central, 3), Err(Error::BudgetExhausted(_))));
        assert!(fx_oracle(&g, &central, 16).is_err());
    }
}
