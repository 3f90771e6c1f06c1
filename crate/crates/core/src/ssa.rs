//! Exhaustive specializations of a parametric group: generation, spectral
//! gaps and injectivity on balls, prime by prime.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{bfs_closure, dense_spectrum, is_generating, lanczos_spectrum, sl_order, Method};
use crate::error::{Error, Result};
use crate::modp::{count_zeros, points, reduce_generators, reduce_matrix, Specialization};
use crate::primes::is_prime;
use crate::ring::{GroupSpec, Mat};

#[derive(Clone, Debug, Serialize)]
pub struct SsaConfig {
    pub primes: Vec<u64>,
    pub eta: f64,
    /// Ball radius `m = ⌈α ln p⌉`.
    pub alpha: f64,
    pub closure_cap: usize,
    /// Tables up to this size use the dense eigensolver, larger ones Lanczos.
    pub dense_limit: usize,
    /// Expander threshold; `None` means half the median gap at the smallest prime.
    pub epsilon: Option<f64>,
    pub seed: u64,
}

impl SsaConfig {
    pub fn new(primes: Vec<u64>) -> Self {
        SsaConfig { primes, eta: 0.5, alpha: 0.3, closure_cap: 200_000, dense_limit: 1000, epsilon: None, seed: 42 }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&p) = self.primes.iter().find(|&&p| p < 5 || !is_prime(p)) {
            return Err(Error::InvalidArgument(format!("{p} is not a prime >= 5")));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) || !(self.alpha > 0.0) {
            return Err(Error::InvalidArgument("need 0 < eta < 1 and alpha > 0".into()));
        }
        Ok(())
    }

    pub fn radius(&self, p: u64) -> usize {
        (self.alpha * (p as f64).ln()).ceil().max(0.0) as usize
    }
}

/// One specialization point.
#[derive(Clone, Debug, Serialize)]
pub struct SsaRow {
    pub p: u64,
    pub point: Vec<u64>,
    pub localizer_nonzero: bool,
    pub generating: Option<bool>,
    pub order: Option<usize>,
    pub gap: Option<f64>,
    pub method: Option<Method>,
    pub injective_on_ball: Option<bool>,
    pub m: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SsaPrime {
    pub p: u64,
    pub points: u128,
    pub evaluated: usize,
    /// Zeros of the localizer; `points - zeros == evaluated` is checked.
    pub localizer_zeros: u64,
    pub non_generating: usize,
    pub non_generating_fraction: f64,
    pub min_gap: Option<f64>,
    pub median_gap: Option<f64>,
    pub injectivity_failures: usize,
    pub expander_fraction: f64,
    pub one_over_p: f64,
    pub one_minus_p_pow: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SsaReport {
    pub rows: Vec<SsaRow>,
    pub primes: Vec<SsaPrime>,
    pub epsilon: f64,
    /// Least-squares `C` in `non_generating_fraction ≈ C / p`.
    pub fitted_c: f64,
    pub ball_sizes: Vec<(usize, usize)>,
}

/// Distinct elements of the ball of radius `m` in `Γ`, with their radius.
fn ball(spec: &GroupSpec, m: usize) -> Result<Vec<(Mat, usize)>> {
    let id = spec.identity();
    let mut seen: HashSet<Mat> = HashSet::from([id.mat().clone()]);
    let mut out = vec![(id.mat().clone(), 0)];
    let mut layer = vec![id];
    for r in 1..=m {
        let mut next = Vec::new();
        for g in &layer {
            for l in spec.letters() {
                let h = g.mul(&spec.letter_element(l))?;
                if seen.insert(h.mat().clone()) {
                    out.push((h.mat().clone(), r));
                    next.push(h);
                }
            }
        }
        layer = next;
    }
    Ok(out)
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn evaluate_point(
    spec: &GroupSpec,
    p: u64,
    point: Vec<u64>,
    m: usize,
    ball: &[(Mat, usize)],
    cfg: &SsaConfig,
) -> Result<SsaRow> {
    let phi = match Specialization::new(p, point.clone(), spec) {
        Ok(phi) => phi,
        Err(Error::InvalidArgument(_)) => {
            return Ok(SsaRow {
                p,
                point,
                localizer_nonzero: false,
                generating: None,
                order: None,
                gap: None,
                method: None,
                injective_on_ball: None,
                m,
            })
        }
        Err(e) => return Err(e),
    };
    let table = bfs_closure(&reduce_generators(spec, &phi)?, cfg.closure_cap)?;
    let graph = table.graph();
    let report = if graph.n < 2 {
        None
    } else if graph.n <= cfg.dense_limit {
        Some(dense_spectrum(&graph)?)
    } else {
        Some(lanczos_spectrum(&graph)?)
    };
    let mut images = HashSet::new();
    let mut injective = true;
    for (g, _) in ball.iter().filter(|(_, r)| *r <= m) {
        if !images.insert(reduce_matrix(g, &phi)?.pack()) {
            injective = false;
            break;
        }
    }
    Ok(SsaRow {
        p,
        point,
        localizer_nonzero: true,
        generating: Some(is_generating(&table)),
        order: Some(table.order()),
        gap: Some(report.as_ref().map_or(0.0, |r| r.gap)),
        method: report.map(|r| r.method),
        injective_on_ball: Some(injective),
        m,
    })
}

/// Every point of `F_p^t` for every configured prime.
pub fn run_ssa(spec: &GroupSpec, cfg: &SsaConfig) -> Result<SsaReport> {
    cfg.validate()?;
    let t = spec.ctx().t();
    let max_m = cfg.primes.iter().map(|&p| cfg.radius(p)).max().unwrap_or(0);
    let ball = ball(spec, max_m)?;
    let ball_sizes = (0..=max_m).map(|m| (m, ball.iter().filter(|(_, r)| *r <= m).count())).collect();
    let mut rows = Vec::new();
    let mut per_prime = Vec::new();
    for &p in &cfg.primes {
        let total = (p as u128).pow(t as u32);
        if total > crate::modp::ENUMERATION_CAP {
            return Err(Error::CapExceeded { needed: total, cap: crate::modp::ENUMERATION_CAP });
        }
        if (sl_order(spec.d(), p) as f64) > 4.0 * cfg.closure_cap as f64 {
            return Err(Error::CapExceeded { needed: sl_order(spec.d(), p), cap: cfg.closure_cap as u128 });
        }
        let m = cfg.radius(p);
        let pts: Vec<Vec<u64>> = points(p, t).collect();
        let prime_rows: Vec<SsaRow> = pts
            .into_par_iter()
            .map(|a| evaluate_point(spec, p, a, m, &ball, cfg))
            .collect::<Result<_>>()?;
        let zeros = count_zeros(spec.localizer(), p)?;
        let valid: Vec<&SsaRow> = prime_rows.iter().filter(|r| r.localizer_nonzero).collect();
        if valid.len() as u128 != total - zeros as u128 {
            return Err(Error::Consistency(format!(
                "p = {p}: {} points evaluated, expected {}",
                valid.len(),
                total - zeros as u128
            )));
        }
        let non_generating = valid.iter().filter(|r| r.generating == Some(false)).count();
        let mut gaps: Vec<f64> =
            valid.iter().filter(|r| r.generating == Some(true)).filter_map(|r| r.gap).collect();
        let min_gap = gaps.iter().copied().reduce(f64::min);
        per_prime.push(SsaPrime {
            p,
            points: total,
            evaluated: valid.len(),
            localizer_zeros: zeros,
            non_generating,
            non_generating_fraction: non_generating as f64 / valid.len().max(1) as f64,
            min_gap,
            median_gap: median(&mut gaps),
            injectivity_failures: valid.iter().filter(|r| r.injective_on_ball == Some(false)).count(),
            expander_fraction: 0.0,
            one_over_p: 1.0 / p as f64,
            one_minus_p_pow: 1.0 - (p as f64).powf(cfg.eta - 1.0),
        });
        rows.extend(prime_rows);
    }
    let epsilon = cfg.epsilon.unwrap_or_else(|| 0.5 * per_prime.first().and_then(|s| s.median_gap).unwrap_or(0.0));
    for s in &mut per_prime {
        let valid: Vec<&SsaRow> = rows.iter().filter(|r| r.p == s.p && r.localizer_nonzero).collect();
        let expanders = valid
            .iter()
            .filter(|r| r.generating == Some(true) && r.gap.is_some_and(|g| g >= epsilon))
            .count();
        s.expander_fraction = expanders as f64 / valid.len().max(1) as f64;
    }
    let num: f64 = per_prime.iter().map(|s| s.non_generating_fraction / s.p as f64).sum();
    let den: f64 = per_prime.iter().map(|s| 1.0 / (s.p as f64).powi(2)).sum();
    let fitted_c = if den > 0.0 { num / den } else { 0.0 };
    Ok(SsaReport { rows, primes: per_prime, epsilon, fitted_c, ball_sizes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{family, free_pair};

    #[test]
    fn family_at_five() {
        let spec = family();
        let r = run_ssa(&spec, &SsaConfig::new(vec![5])).unwrap();
        assert_eq!(r.rows.len(), 5);
        let s0 = &r.rows[0];
        assert_eq!(s0.point, vec![0]);
        assert_eq!(s0.generating, Some(false));
        assert_eq!(s0.order, Some(5));
        assert_eq!(s0.injective_on_ball, Some(false));
        for row in &r.rows[1..] {
            assert_eq!(row.generating, Some(true));
            assert_eq!(row.order, Some(120));
            assert!(row.gap.unwrap() > 0.0);
        }
        assert_eq!(r.primes[0].non_generating, 1);
        assert!((r.fitted_c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parameter_free_group_has_one_point() {
        let r = run_ssa(&free_pair(), &SsaConfig::new(vec![5, 7])).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows.iter().all(|row| row.generating == Some(true)));
        assert_eq!(r.primes[1].evaluated, 1);
    }

    #[test]
    fn config_checks() {
        assert!(SsaConfig::new(vec![3]).validate().is_err());
        assert!(SsaConfig::new(vec![9]).validate().is_err());
        assert_eq!(SsaConfig::new(vec![31]).radius(31), 2);
        assert_eq!(median(&mut [3.0, 1.0, 2.0, 10.0]), Some(2.5));
    }
}
