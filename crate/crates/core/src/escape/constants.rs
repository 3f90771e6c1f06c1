use serde::Serialize;

use super::sampler::random_word;
use crate::error::Result;
use crate::freeprod::{MixedWord, Syllable};
use crate::heights::{height_poly, HeightConstants};
use crate::ring::{GroupSpec, Mat, NLocInt, RingElement};
use crate::rng::{substream, AUX_STREAM_BASE};

/// Degree and height growth of `w(x)` with `x` a generic matrix, measured on
/// random probe words. These stand in for the non-explicit constants of the
/// witness-length argument and are labeled as measurements.
#[derive(Clone, Debug, Serialize)]
pub struct MeasuredConstants {
    /// `max deg (w(x))_ij / ‖w‖` over the probes.
    pub c1: f64,
    /// `max h((w(x))_ij) / ‖w‖` over the probes.
    pub c2: f64,
    pub c_r: f64,
    pub d: usize,
    pub probe_lengths: Vec<usize>,
    pub probes: usize,
}

impl MeasuredConstants {
    /// Prime-window multiplier `max(10 C2 C_R, 4 C1 (d² - 1))`, at least 1.
    pub fn window_multiplier(&self) -> f64 {
        let dim = (self.d * self.d - 1) as f64;
        (10.0 * self.c2 * self.c_r).max(4.0 * self.c1 * dim).max(1.0)
    }
}

fn embed(r: &RingElement, nvars: usize) -> RingElement {
    RingElement::from_terms(
        r.base(),
        nvars,
        r.terms().map(|(m, c)| {
            let mut mono = m.clone();
            mono.resize(nvars, 0);
            (mono, c.clone())
        }),
    )
}

fn embed_mat(m: &Mat, nvars: usize) -> Mat {
    let d = m.dim();
    let rows = (0..d).map(|i| (0..d).map(|j| embed(m.get(i, j), nvars)).collect()).collect();
    Mat::from_rows(rows).expect("square")
}

/// `w(x)` over `R[x_11..x_dd]`; `x⁻¹` is the adjugate, which agrees with the
/// inverse on `SL_d`.
pub fn generic_evaluation(w: &MixedWord, t: usize, n: u64, d: usize) -> Mat {
    let nvars = t + d * d;
    let generic_rows: Vec<Vec<RingElement>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut mono = vec![0u32; nvars];
                    mono[t + i * d + j] = 1;
                    RingElement::monomial(n, mono, NLocInt::one())
                })
                .collect()
        })
        .collect();
    let x = Mat::from_rows(generic_rows).expect("square");
    let x_inv = x.adjugate();
    let one = RingElement::one(n, nvars);
    let zero = RingElement::zero(n, nvars);
    let identity = Mat::from_rows(
        (0..d).map(|i| (0..d).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()).collect(),
    )
    .expect("square");
    let mut acc = identity;
    for s in w.syllables() {
        match s {
            Syllable::Gamma(g) => acc = acc.mul(&embed_mat(g.mat(), nvars)).expect("dims"),
            Syllable::X(e) => {
                let base = if *e < 0 { &x_inv } else { &x };
                for _ in 0..e.unsigned_abs() {
                    acc = acc.mul(base).expect("dims");
                }
            }
        }
    }
    acc
}

/// Probe lengths that keep the symbolic evaluation small for dimension `d`.
pub fn default_probe_lengths(d: usize) -> Vec<usize> {
    match d {
        0..=2 => vec![1, 2, 3, 4],
        3 => vec![1, 2, 3],
        _ => vec![1, 2],
    }
}

pub fn measure_constants(
    spec: &GroupSpec,
    lengths: &[usize],
    per_length: usize,
    seed: u64,
) -> Result<MeasuredConstants> {
    let ctx = spec.ctx();
    let (t, n, d) = (ctx.t(), ctx.n(), spec.d());
    let mut rng = substream(seed, AUX_STREAM_BASE + 3);
    let (mut c1, mut c2) = (0.0f64, 0.0f64);
    let mut probes = 0;
    for &len in lengths {
        for _ in 0..per_length {
            let w = random_word(spec, len, &mut rng)?;
            let m = generic_evaluation(&w, t, n, d);
            let norm = w.length().max(1) as f64;
            for e in m.entries() {
                if e.is_zero() {
                    continue;
                }
                let deg = e.terms().map(|(mono, _)| mono[t..].iter().sum::<u32>()).max().unwrap_or(0);
                c1 = c1.max(deg as f64 / norm);
                c2 = c2.max(height_poly(e) / norm);
            }
            probes += 1;
        }
    }
    Ok(MeasuredConstants {
        c1,
        c2,
        c_r: HeightConstants::for_ctx(ctx).c_r,
        d,
        probe_lengths: lengths.to_vec(),
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::free_pair;
    use crate::modp::{reduce_matrix, LetterImages, Specialization};

    #[test]
    fn generic_matches_specialized() {
        let spec = free_pair();
        let w = MixedWord::parse("A x B x^-1 x^-1", &spec).unwrap();
        let m = generic_evaluation(&w, 0, 2, 2);
        // substitute x = AB^-1 mod 7 in the generic result
        let gamma = spec.element(&[crate::ring::Letter(1), crate::ring::Letter(-2)]);
        let phi = Specialization::new(7, vec![], &spec).unwrap();
        let g7 = reduce_matrix(gamma.mat(), &phi).unwrap();
        let point: Vec<u64> = g7.entries().to_vec();
        let via_generic: Vec<u64> = m.entries().iter().map(|e| e.eval_mod_p(7, &point).unwrap()).collect();
        let images = LetterImages::new(&spec, &phi).unwrap();
        assert_eq!(via_generic, w.evaluate_mod_p(&g7, &images).entries());
        // degree: three x letters of degree one each
        let deg = m.entries().iter().map(|e| e.degree()).max().unwrap();
        assert_eq!(deg, 3);
    }

    #[test]
    fn free_pair_constants() {
        let c = measure_constants(&free_pair(), &[1, 2, 3], 4, 42).unwrap();
        assert_eq!(c.probes, 12);
        assert!(c.c1 > 0.0 && c.c1 <= 1.0);
        assert!(c.c2 > 0.0);
        assert_eq!(c.c_r, 4.0);
        assert!(c.window_multiplier() >= 10.0 * c.c2 * 4.0);
    }
}
