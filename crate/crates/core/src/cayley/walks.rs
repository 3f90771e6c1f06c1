use std::collections::HashSet;

use serde::Serialize;

use super::{CayleyGraph, FiniteGroupTable};
use crate::error::{Error, Result};

/// Smallest `k` with `(1 - ε)^k ≤ 1/|V|`, i.e. `ceil(-ln|V| / ln(1 - ε))`.
/// `None` when `ε ≤ 0`.
pub fn rw_threshold(n: usize, eps: f64) -> Option<u64> {
    if eps <= 0.0 || n == 0 {
        return None;
    }
    if eps >= 1.0 || n == 1 {
        return Some(0);
    }
    Some((-(n as f64).ln() / (1.0 - eps).ln()).ceil().max(0.0) as u64)
}

/// Law of `x_k = s_k ⋯ s_1 v0` for iid uniform steps `s_i`.
pub fn walk_distribution(g: &CayleyGraph, v0: usize, k: u64) -> Result<Vec<f64>> {
    if v0 >= g.n {
        return Err(Error::InvalidArgument(format!("start vertex {v0} out of range")));
    }
    let mut x = vec![0.0; g.n];
    x[v0] = 1.0;
    let mut next = vec![0.0; g.n];
    let w = 1.0 / g.perms.len() as f64;
    for _ in 0..k {
        next.iter_mut().for_each(|y| *y = 0.0);
        for perm in &g.perms {
            for (i, &j) in perm.iter().enumerate() {
                next[j as usize] += w * x[i];
            }
        }
        std::mem::swap(&mut x, &mut next);
    }
    Ok(x)
}

#[derive(Clone, Debug, Serialize)]
pub struct RwCheck {
    pub probability: f64,
    /// `2|U|/|V|`.
    pub bound: f64,
    /// `Pr < bound`; for empty `U` this is `Pr == 0`.
    pub pass: bool,
    pub k: u64,
    pub threshold: Option<u64>,
    /// False when `k` is below the threshold; the numbers are still exact.
    pub asserted: bool,
}

/// Exact `Pr(x_k ∈ U)` against `2|U|/|V|`, with `eps` the spectral gap.
pub fn rw_bound_check(g: &CayleyGraph, u: &[u32], k: u64, v0: usize, eps: f64) -> Result<RwCheck> {
    let members: HashSet<u32> = u.iter().copied().collect();
    if let Some(&bad) = members.iter().find(|&&i| i as usize >= g.n) {
        return Err(Error::InvalidArgument(format!("vertex {bad} out of range")));
    }
    let dist = walk_distribution(g, v0, k)?;
    let probability: f64 = members.iter().map(|&i| dist[i as usize]).sum();
    let bound = 2.0 * members.len() as f64 / g.n as f64;
    let pass = if members.is_empty() { probability == 0.0 } else { probability < bound };
    let threshold = rw_threshold(g.n, eps);
    let asserted = threshold.is_some_and(|t| k >= t);
    Ok(RwCheck { probability, bound, pass, k, threshold, asserted })
}

/// Largest walk mass found on a proper subgroup.
#[derive(Clone, Debug, Serialize)]
pub struct SubgroupMass {
    pub mass: f64,
    pub subgroup_order: usize,
    /// Index of an element generating the heaviest subgroup.
    pub generator: u32,
    pub subgroups_scanned: usize,
    /// Family the maximum ranges over.
    pub proxy: &'static str,
}

/// `max μ^k(H)` over the cyclic subgroups `H = ⟨g⟩ ≠ G` (including the
/// trivial one), for the walk started at the identity. A lower bound for
/// the maximum over all proper subgroups.
pub fn subgroup_escape_mass(table: &FiniteGroupTable, k: u64) -> Result<SubgroupMass> {
    let n = table.order();
    let dist = walk_distribution(&table.graph(), 0, k)?;
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut best = SubgroupMass { mass: -1.0, subgroup_order: 0, generator: 0, subgroups_scanned: 0, proxy: "cyclic" };
    for (gi, g) in table.elements.iter().enumerate() {
        let mut members = vec![0u32];
        let mut cur = g.clone();
        while !cur.is_identity() {
            let idx = table
                .index_of(&cur)
                .ok_or_else(|| Error::Consistency("power left the enumerated group".into()))?;
            members.push(idx);
            cur = cur.mul(g);
        }
        if members.len() == n && n > 1 {
            continue;
        }
        members.sort_unstable();
        if !seen.insert(members.clone()) {
            continue;
        }
        let mass: f64 = members.iter().map(|&i| dist[i as usize]).sum();
        if mass > best.mass {
            best.mass = mass;
            best.subgroup_order = members.len();
            best.generator = gi as u32;
        }
    }
    best.subgroups_scanned = seen.len();
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::{bfs_closure, spectral_gap};
    use crate::modp::FpMatrix;
    use rand::seq::index::sample;

    fn table(p: u64) -> FiniteGroupTable {
        let a = FpMatrix::new(2, p, &[1, 2, 0, 1]).unwrap();
        let b = FpMatrix::new(2, p, &[1, 0, 2, 1]).unwrap();
        bfs_closure(&[a.clone(), a.inverse(), b.clone(), b.inverse()], 100_000).unwrap()
    }

    #[test]
    fn thresholds() {
        assert_eq!(rw_threshold(100, 0.0), None);
        assert_eq!(rw_threshold(100, 1.0), Some(0));
        // 0.5^7 = 1/128 <= 1/100 < 1/64
        assert_eq!(rw_threshold(100, 0.5), Some(7));
    }

    #[test]
    fn trivial_subsets() {
        let t = table(5);
        let g = t.graph();
        let eps = spectral_gap(&g).unwrap().gap;
        let all: Vec<u32> = (0..g.n as u32).collect();
        let r = rw_bound_check(&g, &all, 5, 0, eps).unwrap();
        assert!((r.probability - 1.0).abs() < 1e-12);
        assert!(r.pass && r.bound == 2.0);
        let r = rw_bound_check(&g, &[], 5, 0, eps).unwrap();
        assert_eq!(r.probability, 0.0);
        assert!(r.pass);
        assert!(!rw_bound_check(&g, &[1], 0, 1, eps).unwrap().pass);
        assert!(!rw_bound_check(&g, &[1], 0, 1, eps).unwrap().asserted);
    }

    #[test]
    fn random_subset_at_threshold() {
        let t = table(5);
        let g = t.graph();
        let eps = spectral_gap(&g).unwrap().gap;
        let k = rw_threshold(g.n, eps).unwrap();
        let mut rng = crate::rng::substream(42, 0);
        for _ in 0..20 {
            let u: Vec<u32> = sample(&mut rng, g.n, 12).iter().map(|i| i as u32).collect();
            let r = rw_bound_check(&g, &u, k, 0, eps).unwrap();
            assert!(r.asserted && r.pass, "{r:?}");
        }
    }

    #[test]
    fn distribution_sums_to_one_and_mixes() {
        let t = table(7);
        let g = t.graph();
        let x = walk_distribution(&g, 0, 60).unwrap();
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let u = 1.0 / g.n as f64;
        assert!(x.iter().all(|&v| (v - u).abs() < 0.5 * u));
    }

    #[test]
    fn subgroup_masses() {
        let t = table(5);
        let m0 = subgroup_escape_mass(&t, 0).unwrap();
        assert_eq!(m0.mass, 1.0);
        // large k: every cyclic subgroup carries close to |H|/|V|
        let m = subgroup_escape_mass(&t, 200).unwrap();
        let stationary = m.subgroup_order as f64 / t.order() as f64;
        assert!(m.mass <= 2.0 * stationary && m.mass >= 0.5 * stationary);
        // SL2(F5) has cyclic subgroups of orders 1, 2, 3, 4, 5, 6, 10
        assert_eq!(m.subgroup_order, 10);
    }

    #[test]
    fn sl2_f7_mass_below_p_power() {
        let t = table(7);
        let g = t.graph();
        let eps = spectral_gap(&g).unwrap().gap;
        let k = 3 * rw_threshold(g.n, eps).unwrap();
        let m = subgroup_escape_mass(&t, k).unwrap();
        assert!(m.mass < 7f64.powf(-0.25), "{m:?}");
    }
}
