use std::fmt;

use super::poly::{RingCtx, RingElement};
use crate::error::{Error, Result};

/// Square matrix over `Z[1/N][x_1..x_t]`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    d: usize,
    entries: Vec<RingElement>,
}

impl Mat {
    pub fn identity(ctx: &RingCtx, d: usize) -> Self {
        let entries = (0..d * d)
            .map(|k| if k / d == k % d { ctx.one() } else { ctx.zero() })
            .collect();
        Mat { d, entries }
    }

    pub fn from_rows(rows: Vec<Vec<RingElement>>) -> Result<Self> {
        let d = rows.len();
        let mut entries = Vec::with_capacity(d * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch(d, row.len()));
            }
            entries.extend(row);
        }
        if let Some(first) = entries.first() {
            let (n, t) = (first.base(), first.nvars());
            if entries.iter().any(|e| e.base() != n || e.nvars() != t) {
                return Err(Error::ContextMismatch("matrix entries from different rings".into()));
            }
        }
        Ok(Mat { d, entries })
    }

    /// Integer matrix in the given ring.
    pub fn from_ints(ctx: &RingCtx, rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| ctx.int(v)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.entries[i * self.d + j]
    }

    pub fn entries(&self) -> &[RingElement] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(k, e)| if k / self.d == k % self.d { e.is_one() } else { e.is_zero() })
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(self.d, other.d));
        }
        let d = self.d;
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = self.get(i, 0) * other.get(0, j);
                for k in 1..d {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                entries.push(acc);
            }
        }
        Ok(Mat { d, entries })
    }

    fn minor(&self, row: usize, col: usize) -> Mat {
        let d = self.d;
        let entries = (0..d)
            .filter(|&i| i != row)
            .flat_map(|i| (0..d).filter(move |&j| j != col).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        Mat { d: d - 1, entries }
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> RingElement {
        match self.d {
            0 => unreachable!("empty matrix"),
            1 => self.entries[0].clone(),
            2 => &(self.get(0, 0) * self.get(1, 1)) - &(self.get(0, 1) * self.get(1, 0)),
            _ => {
                let mut acc = self.entries[0].zero_like();
                for j in 0..self.d {
                    let a = self.get(0, j);
                    if a.is_zero() {
                        continue;
                    }
                    let term = a * &self.minor(0, j).det();
                    acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
                }
                acc
            }
        }
    }

    pub fn adjugate(&self) -> Mat {
        let d = self.d;
        if d == 1 {
            return Mat { d, entries: vec![self.entries[0].one_like()] };
        }
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let c = self.minor(j, i).det();
                entries.push(if (i + j) % 2 == 0 { c } else { -&c });
            }
        }
        Mat { d, entries }
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> Result<Mat> {
        let det = self.det();
        if !det.is_one() {
            return Err(Error::Determinant(det.to_string()));
        }
        Ok(self.adjugate())
    }

    pub fn to_string_with(&self, vars: &[String]) -> String {
        let rows: Vec<String> = (0..self.d)
            .map(|i| {
                let row: Vec<String> = (0..self.d).map(|j| self.get(i, j).to_string_with(vars)).collect();
                format!("[{}]", row.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = match self.entries.first() {
            Some(e) => (1..=e.nvars()).map(|i| format!("x{i}")).collect(),
            None => Vec::new(),
        };
        f.write_str(&self.to_string_with(&vars))
    }
}

/// A generator of `X` or its inverse: `+(i+1)` is generator `i`, `-(i+1)` its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub i32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        let v = generator as i32 + 1;
        Letter(if inverse { -v } else { v })
    }

    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }
}

/// Appends `tail` to `word`, cancelling adjacent inverse letters at the seam.
pub fn append_reduced(word: &mut Vec<Letter>, tail: &[Letter]) {
    let mut skip = 0;
    while skip < tail.len() && word.last() == Some(&tail[skip].inverse()) {
        word.pop();
        skip += 1;
    }
    word.extend_from_slice(&tail[skip..]);
}

/// Free reduction of a letter sequence.
pub fn free_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out = Vec::with_capacity(word.len());
    for &l in word {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// A determinant-one matrix together with the generator word that produced it.
///
/// `word` is `None` for matrices built directly rather than from generators;
/// asking such an element for its length is an error.
#[derive(Clone, Debug)]
pub struct GroupElement {
    mat: Mat,
    word: Option<Vec<Letter>>,
}

impl GroupElement {
    /// Wraps an externally built matrix after checking `det = 1`.
    pub fn external(mat: Mat) -> Result<Self> {
        let det = mat.det();
        if !det.is_one() {
            return Err(Error::Determinant(det.to_string()));
        }
        Ok(GroupElement { mat, word: None })
    }

    /// Caller guarantees `det = 1` and that `word` multiplies out to `mat`.
    pub(crate) fn from_parts(mat: Mat, word: Option<Vec<Letter>>) -> Self {
        GroupElement { mat, word }
    }

    pub fn identity(ctx: &RingCtx, d: usize) -> Self {
        GroupElement { mat: Mat::identity(ctx, d), word: Some(Vec::new()) }
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn into_mat(self) -> Mat {
        self.mat
    }

    pub fn word(&self) -> Option<&[Letter]> {
        self.word.as_deref()
    }

    /// Length of the (freely reduced) generator word.
    pub fn word_length(&self) -> Result<usize> {
        self.word.as_ref().map(Vec::len).ok_or(Error::NoWord)
    }

    pub fn dim(&self) -> usize {
        self.mat.d
    }

    pub fn is_identity(&self) -> bool {
        self.mat.is_identity()
    }

    pub fn same_matrix(&self, other: &GroupElement) -> bool {
        self.mat == other.mat
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        let mat = self.mat.mul(&other.mat)?;
        let word = match (&self.word, &other.word) {
            (Some(a), Some(b)) => {
                let mut w = a.clone();
                append_reduced(&mut w, b);
                Some(w)
            }
            _ => None,
        };
        Ok(GroupElement { mat, word })
    }

    /// Right-multiplies in place: `self <- self * other`.
    pub fn mul_assign(&mut self, other: &GroupElement) -> Result<()> {
        self.mat = self.mat.mul(&other.mat)?;
        match (&mut self.word, &other.word) {
            (Some(a), Some(b)) => append_reduced(a, b),
            _ => self.word = None,
        }
        Ok(())
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            mat: self.mat.adjugate(),
            word: self.word.as_ref().map(|w| w.iter().rev().map(|l| l.inverse()).collect()),
        }
    }

    /// `self^e` by repeated squaring; negative `e` inverts first.
    pub fn pow(&self, e: i64) -> Result<GroupElement> {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let d = self.dim();
        let mut acc = GroupElement {
            mat: Mat { d, entries: Mat::identity_like(&self.mat) },
            word: self.word.as_ref().map(|_| Vec::new()),
        };
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc.mul_assign(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }
}

impl Mat {
    fn identity_like(m: &Mat) -> Vec<RingElement> {
        let e = &m.entries[0];
        (0..m.d * m.d)
            .map(|k| if k / m.d == k % m.d { e.one_like() } else { e.zero_like() })
            .collect()
    }
}

impl PartialEq for GroupElement {
    /// Elements compare by matrix; the recorded word is bookkeeping.
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl Eq for GroupElement {}
