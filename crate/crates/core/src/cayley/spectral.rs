use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use super::CayleyGraph;
use crate::error::{Error, Result};
use crate::rng::{substream, AUX_STREAM_BASE};

/// Graphs up to this size use the dense solver.
pub const DENSE_LIMIT: usize = 5000;

const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Lanczos,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dense => "dense",
            Method::Lanczos => "lanczos",
        }
    }
}

/// Spectrum of the Markov operator of a Cayley graph.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    /// Dense: every eigenvalue, descending. Lanczos: the converged extreme
    /// Ritz values on the complement of the constants, descending.
    pub eigenvalues: Vec<f64>,
    /// Largest absolute value of a nontrivial eigenvalue.
    pub lambda2_abs: f64,
    /// `1 - |λ2|`, clamped to `[0, 1]`.
    pub gap: f64,
    pub method: Method,
    /// Largest residual `‖M v - θ v‖` among the reported Ritz pairs (0 for dense).
    pub residual: f64,
    pub connected: bool,
}

impl SpectralReport {
    fn new(eigenvalues: Vec<f64>, lambda2_abs: f64, method: Method, residual: f64, connected: bool) -> Self {
        let gap = if connected { (1.0 - lambda2_abs).clamp(0.0, 1.0) } else { 0.0 };
        SpectralReport { eigenvalues, lambda2_abs, gap, method, residual, connected }
    }
}

/// Dense below [`DENSE_LIMIT`] vertices, Lanczos above.
pub fn spectral_gap(g: &CayleyGraph) -> Result<SpectralReport> {
    if g.n <= DENSE_LIMIT {
        dense_spectrum(g)
    } else {
        lanczos_spectrum(g)
    }
}

fn require_symmetric(g: &CayleyGraph) -> Result<()> {
    if !g.is_symmetric() {
        return Err(Error::AsymmetricGenerators("Markov operator is not symmetric".into()));
    }
    if g.n < 2 {
        return Err(Error::InvalidArgument("graph needs at least two vertices".into()));
    }
    Ok(())
}

pub fn dense_spectrum(g: &CayleyGraph) -> Result<SpectralReport> {
    require_symmetric(g)?;
    let n = g.n;
    let w = 1.0 / g.perms.len() as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for perm in &g.perms {
        for (i, &j) in perm.iter().enumerate() {
            m[(i, j as usize)] += w;
        }
    }
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    // drop one copy of the eigenvalue 1 (the constants)
    let lambda2_abs = ev[1..].iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(SpectralReport::new(ev, lambda2_abs, Method::Dense, 0.0, g.is_connected()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

fn remove_mean(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

/// Lanczos with full reorthogonalization on the complement of the constant
/// vector; stops when both extreme Ritz values have residual at most 1e-8.
pub fn lanczos_spectrum(g: &CayleyGraph) -> Result<SpectralReport> {
    require_symmetric(g)?;
    let n = g.n;
    let max_iter = (n - 1).min(600);
    let mut rng = substream(0x5eed, AUX_STREAM_BASE + 1);
    let mut q: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    remove_mean(&mut q);
    let norm = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|x| *x /= norm);

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    loop {
        let j = basis.len() - 1;
        g.markov_apply(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        axpy(&mut w, -a, &basis[j]);
        if j > 0 {
            axpy(&mut w, -beta[j - 1], &basis[j - 1]);
        }
        for _ in 0..2 {
            remove_mean(&mut w);
            for v in &basis {
                let c = dot(&w, v);
                axpy(&mut w, -c, v);
            }
        }
        let b = dot(&w, &w).sqrt();
        let m = alpha.len();
        let done = b < 1e-12 || m >= max_iter;
        if done || (m >= 20 && m % 5 == 0) {
            let mut t = DMatrix::<f64>::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alpha[i];
                if i + 1 < m {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let (mut imax, mut imin) = (0, 0);
            for i in 0..m {
                if eig.eigenvalues[i] > eig.eigenvalues[imax] {
                    imax = i;
                }
                if eig.eigenvalues[i] < eig.eigenvalues[imin] {
                    imin = i;
                }
            }
            let res = |i: usize| (b * eig.eigenvectors[(m - 1, i)]).abs();
            let residual = res(imax).max(res(imin));
            if residual <= RESIDUAL_TOL || done {
                if residual > RESIDUAL_TOL {
                    return Err(Error::Consistency(format!(
                        "Lanczos stopped after {m} steps with residual {residual:.3e}"
                    )));
                }
                let (hi, lo) = (eig.eigenvalues[imax], eig.eigenvalues[imin]);
                let mut ev = vec![hi, lo];
                ev.dedup();
                let lambda2_abs = hi.abs().max(lo.abs());
                return Ok(SpectralReport::new(ev, lambda2_abs, Method::Lanczos, residual, g.is_connected()));
            }
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
}
