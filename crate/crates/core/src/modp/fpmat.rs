use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{inv_mod, mul_mod};

/// A `d x d` matrix over `F_p`, row-major with entries in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpMatrix {
    d: usize,
    p: u64,
    entries: Vec<u64>,
}

impl FpMatrix {
    pub fn identity(d: usize, p: u64) -> Self {
        let entries = (0..d * d).map(|k| u64::from(k / d == k % d)).collect();
        FpMatrix { d, p, entries }
    }

    /// Reduces arbitrary signed entries mod `p` and checks `det = 1`.
    pub fn new(d: usize, p: u64, entries: &[i64]) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::DimensionMismatch(d * d, entries.len()));
        }
        let m = Self::from_raw(d, p, entries.iter().map(|&v| v.rem_euclid(p as i64) as u64).collect());
        let det = m.det();
        if det != 1 % p {
            return Err(Error::Determinant(format!("{det} mod {p}")));
        }
        Ok(m)
    }

    /// Entries already reduced; no determinant check.
    pub fn from_raw(d: usize, p: u64, entries: Vec<u64>) -> Self {
        debug_assert_eq!(entries.len(), d * d);
        debug_assert!(entries.iter().all(|&e| e < p));
        FpMatrix { d, p, entries }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.d + j]
    }

    pub fn is_identity(&self) -> bool {
        self.first_nonidentity_entry().is_none()
    }

    /// First entry, in row-major order, that differs from the identity.
    pub fn first_nonidentity_entry(&self) -> Option<(usize, usize, u64)> {
        let d = self.d;
        self.entries
            .iter()
            .enumerate()
            .find(|&(k, &e)| e != u64::from(k / d == k % d))
            .map(|(k, &e)| (k / d, k % d, e))
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert!(self.d == other.d && self.p == other.p, "incompatible F_p matrices");
        let (d, p) = (self.d, self.p);
        let mut entries = vec![0u64; d * d];
        if p < (1 << 31) && d <= 4 {
            // products fit u64 and so does a sum of up to 4 of them
            for i in 0..d {
                for j in 0..d {
                    let mut acc = 0u64;
                    for k in 0..d {
                        acc += self.entries[i * d + k] * other.entries[k * d + j];
                    }
                    entries[i * d + j] = acc % p;
                }
            }
        } else {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = 0u128;
                    for k in 0..d {
                        acc += self.entries[i * d + k] as u128 * other.entries[k * d + j] as u128;
                    }
                    entries[i * d + j] = (acc % p as u128) as u64;
                }
            }
        }
        FpMatrix { d, p, entries }
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self) -> u64 {
        let (d, p) = (self.d, self.p);
        let mut a = self.entries.clone();
        let mut det = 1u64;
        for c in 0..d {
            let Some(r) = (c..d).find(|&r| a[r * d + c] != 0) else {
                return 0;
            };
            if r != c {
                for j in 0..d {
                    a.swap(r * d + j, c * d + j);
                }
                det = (p - det) % p;
            }
            let piv = a[c * d + c];
            det = mul_mod(det, piv, p);
            let inv = inv_mod(piv, p).expect("nonzero pivot mod a prime");
            for r in c + 1..d {
                let f = mul_mod(a[r * d + c], inv, p);
                if f == 0 {
                    continue;
                }
                for j in c..d {
                    let sub = mul_mod(f, a[c * d + j], p);
                    a[r * d + j] = (a[r * d + j] + p - sub) % p;
                }
            }
        }
        det
    }

    /// Inverse of a determinant-one matrix via the adjugate (2x2) or
    /// Gauss-Jordan elimination.
    pub fn inverse(&self) -> FpMatrix {
        let (d, p) = (self.d, self.p);
        if d == 2 {
            let [a, b, c, e] = [self.entries[0], self.entries[1], self.entries[2], self.entries[3]];
            return FpMatrix { d, p, entries: vec![e, (p - b) % p, (p - c) % p, a] };
        }
        let mut a = self.entries.clone();
        let mut inv = Self::identity(d, p).entries;
        for c in 0..d {
            let r = (c..d).find(|&r| a[r * d + c] != 0).expect("invertible matrix");
            for j in 0..d {
                a.swap(r * d + j, c * d + j);
                inv.swap(r * d + j, c * d + j);
            }
            let s = inv_mod(a[c * d + c], p).expect("nonzero pivot");
            for j in 0..d {
                a[c * d + j] = mul_mod(a[c * d + j], s, p);
                inv[c * d + j] = mul_mod(inv[c * d + j], s, p);
            }
            for r in 0..d {
                if r == c || a[r * d + c] == 0 {
                    continue;
                }
                let f = a[r * d + c];
                for j in 0..d {
                    a[r * d + j] = (a[r * d + j] + p - mul_mod(f, a[c * d + j], p)) % p;
                    inv[r * d + j] = (inv[r * d + j] + p - mul_mod(f, inv[c * d + j], p)) % p;
                }
            }
        }
        FpMatrix { d, p, entries: inv }
    }

    /// Packs entries into a single key; requires `p^(d*d)` to fit in 128 bits.
    pub fn pack(&self) -> u128 {
        self.entries.iter().fold(0u128, |acc, &e| acc * self.p as u128 + e as u128)
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.d {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = (0..self.d).map(|j| self.get(i, j).to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "] mod {}", self.p)
    }
}
