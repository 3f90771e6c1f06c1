//! Finite matrix groups over `F_p`, their Cayley graphs and Markov spectra.

mod spectral;
mod walks;

pub use spectral::{dense_spectrum, lanczos_spectrum, spectral_gap, Method, SpectralReport, DENSE_LIMIT};
pub use walks::{rw_bound_check, rw_threshold, subgroup_escape_mass, walk_distribution, RwCheck, SubgroupMass};

use std::collections::HashMap;
use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modp::FpMatrix;

/// `|SL_d(F_p)| = p^(d(d-1)/2) * prod_{i=2..d} (p^i - 1)`.
pub fn sl_order(d: usize, p: u64) -> u128 {
    let p = p as u128;
    let mut n = p.pow((d * (d - 1) / 2) as u32);
    for i in 2..=d as u32 {
        n *= p.pow(i) - 1;
    }
    n
}

/// The subgroup generated by a set of matrices, listed in breadth-first
/// order from the identity (index 0), with the left action of each generator
/// recorded as a permutation of indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteGroupTable {
    pub p: u64,
    pub d: usize,
    pub elements: Vec<FpMatrix>,
    /// `perms[s][i]` is the index of `gens[s] * elements[i]`.
    pub perms: Vec<Vec<u32>>,
    pub gens: Vec<FpMatrix>,
    #[serde(skip)]
    index: HashMap<u128, u32>,
}

/// Breadth-first closure; fails once more than `cap` elements are found.
pub fn bfs_closure(gens: &[FpMatrix], cap: usize) -> Result<FiniteGroupTable> {
    let first = gens.first().ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
    let (d, p) = (first.dim(), first.p());
    if (p as f64).powi((d * d) as i32) >= 2f64.powi(127) {
        return Err(Error::InvalidArgument(format!("SL_{d}(F_{p}) elements do not pack into 128 bits")));
    }
    for g in gens {
        if g.dim() != d || g.p() != p {
            return Err(Error::DimensionMismatch(d, g.dim()));
        }
        if g.det() != 1 % p {
            return Err(Error::Determinant(format!("{} mod {p}", g.det())));
        }
    }
    let id = FpMatrix::identity(d, p);
    let mut index = HashMap::new();
    index.insert(id.pack(), 0u32);
    let mut elements = vec![id];
    let mut perms: Vec<Vec<u32>> = vec![Vec::new(); gens.len()];
    let mut queue = VecDeque::from([0u32]);
    while let Some(i) = queue.pop_front() {
        for (s, g) in gens.iter().enumerate() {
            let h = g.mul(&elements[i as usize]);
            let key = h.pack();
            let j = match index.get(&key) {
                Some(&j) => j,
                None => {
                    if elements.len() >= cap {
                        return Err(Error::CapExceeded { needed: elements.len() as u128 + 1, cap: cap as u128 });
                    }
                    let j = elements.len() as u32;
                    index.insert(key, j);
                    elements.push(h);
                    queue.push_back(j);
                    j
                }
            };
            let perm = &mut perms[s];
            if perm.len() <= i as usize {
                perm.resize(i as usize + 1, u32::MAX);
            }
            perm[i as usize] = j;
        }
    }
    Ok(FiniteGroupTable { p, d, elements, perms, gens: gens.to_vec(), index })
}

impl FiniteGroupTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, m: &FpMatrix) -> Option<u32> {
        self.index.get(&m.pack()).copied()
    }

    /// Rebuilds the lookup index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self.elements.iter().enumerate().map(|(i, m)| (m.pack(), i as u32)).collect();
    }

    /// True when every generator's inverse is also a generator.
    pub fn is_symmetric(&self) -> bool {
        self.gens.iter().all(|g| self.gens.contains(&g.inverse()))
    }

    pub fn graph(&self) -> CayleyGraph {
        CayleyGraph { n: self.order(), perms: self.perms.clone() }
    }
}

/// `φ(Γ) = SL_d(F_p)`: the closure has the full order.
pub fn is_generating(table: &FiniteGroupTable) -> bool {
    table.order() as u128 == sl_order(table.d, table.p)
}

/// A regular graph given by permutations of its vertices; the Markov
/// operator averages over them.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    pub n: usize,
    pub perms: Vec<Vec<u32>>,
}

impl CayleyGraph {
    pub fn new(n: usize, perms: Vec<Vec<u32>>) -> Result<Self> {
        for p in &perms {
            if p.len() != n {
                return Err(Error::DimensionMismatch(n, p.len()));
            }
            let mut seen = vec![false; n];
            for &j in p {
                if j as usize >= n || std::mem::replace(&mut seen[j as usize], true) {
                    return Err(Error::InvalidArgument("edge map is not a permutation".into()));
                }
            }
        }
        Ok(CayleyGraph { n, perms })
    }

    /// `Cay(Z/n, {+1, -1})`.
    pub fn cycle(n: usize) -> Self {
        let up = (0..n).map(|i| ((i + 1) % n) as u32).collect();
        let down = (0..n).map(|i| ((i + n - 1) % n) as u32).collect();
        CayleyGraph { n, perms: vec![up, down] }
    }

    /// `(M x)(v) = avg_s x(s v)`.
    pub fn markov_apply(&self, x: &[f64], out: &mut [f64]) {
        let w = 1.0 / self.perms.len() as f64;
        out.iter_mut().for_each(|o| *o = 0.0);
        for perm in &self.perms {
            for (o, &j) in out.iter_mut().zip(perm) {
                *o += x[j as usize];
            }
        }
        out.iter_mut().for_each(|o| *o *= w);
    }

    /// The Markov operator is symmetric exactly when the multiset of edge
    /// maps is closed under inversion.
    pub fn is_symmetric(&self) -> bool {
        let inverses: Vec<Vec<u32>> = self
            .perms
            .iter()
            .map(|p| {
                let mut inv = vec![0u32; self.n];
                for (i, &j) in p.iter().enumerate() {
                    inv[j as usize] = i as u32;
                }
                inv
            })
            .collect();
        let mut a = self.perms.clone();
        let mut b = inverses;
        a.sort();
        b.sort();
        a == b
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for p in &self.perms {
                let u = p[v] as usize;
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64, e: &[i64]) -> FpMatrix {
        FpMatrix::new(2, p, e).unwrap()
    }

    fn pair(p: u64) -> Vec<FpMatrix> {
        let a = m(p, &[1, 2, 0, 1]);
        let b = m(p, &[1, 0, 2, 1]);
        vec![a.clone(), a.inverse(), b.clone(), b.inverse()]
    }

    #[test]
    fn orders() {
        assert_eq!(sl_order(2, 5), 120);
        assert_eq!(sl_order(2, 2), 6);
        assert_eq!(sl_order(3, 2), 168);
        let t = bfs_closure(&[m(2, &[1, 1, 0, 1]), m(2, &[1, 0, 1, 1])], 100).unwrap();
        assert_eq!(t.order(), 6);
        assert!(is_generating(&t));
        let t = bfs_closure(&pair(3), 100).unwrap();
        assert_eq!(t.order(), 24);
        let t = bfs_closure(&[m(5, &[1, 0, 0, 1]), m(5, &[1, 0, 2, 1])], 1000).unwrap();
        assert_eq!(t.order(), 5);
        assert!(!is_generating(&t));
        let t = bfs_closure(&pair(5), 1000).unwrap();
        assert_eq!(t.order(), 120);
        assert!(is_generating(&t));
        assert!(t.is_symmetric());
        assert!(matches!(bfs_closure(&pair(5), 50), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn whole_group_enumeration() {
        let p: u64 = 3;
        let mut all = Vec::new();
        for e in 0..p.pow(4) {
            let v: Vec<i64> = (0..4).map(|k| ((e / p.pow(k)) % p) as i64).collect();
            if let Ok(g) = FpMatrix::new(2, p, &v) {
                all.push(g);
            }
        }
        assert_eq!(all.len(), 24);
        let t = bfs_closure(&all, 100).unwrap();
        assert!(is_generating(&t));
    }

    #[test]
    fn table_structure() {
        let t = bfs_closure(&pair(7), 1000).unwrap();
        assert!(t.elements[0].is_identity());
        for (s, perm) in t.perms.iter().enumerate() {
            assert_eq!(perm.len(), t.order());
            for (i, &j) in perm.iter().enumerate() {
                assert_eq!(t.gens[s].mul(&t.elements[i]), t.elements[j as usize]);
            }
        }
        let g = t.graph();
        assert!(g.is_symmetric());
        assert!(g.is_connected());
        let n = t.order() as f64;
        assert!((7f64 - 1.0).powi(3) <= n && n <= (7f64 + 1.0).powi(3));
    }

    #[test]
    fn graph_validation() {
        assert!(CayleyGraph::new(3, vec![vec![0, 0, 1]]).is_err());
        assert!(CayleyGraph::cycle(5).is_symmetric());
        let two = CayleyGraph::new(4, vec![vec![1, 0, 3, 2]]).unwrap();
        assert!(!two.is_connected());
    }
}
