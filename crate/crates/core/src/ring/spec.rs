//! Group specifications: a ring, a dimension and a symmetric generating set.
//!
//! The JSON document looks like
//!
//! ```json
//! {
//!   "N": 2, "t": 1, "vars": ["s"], "d": 2,
//!   "generators": { "A": [["1", "s"], ["0", "1"]], "B": [[1, 0], [2, 1]] },
//!   "density_asserted": true
//! }
//! ```
//!
//! `N`, `t` and `vars` may be omitted. A missing `N` (or `N < 2`) is replaced
//! by the smallest base clearing every denominator, 2 for integral input.
//! Optional `inverses` (name to matrix) are checked against the adjugate, and
//! an optional `localizer` polynomial is multiplied into the computed one.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Deserialize;
use serde_json::{Map, Value};

use super::matrix::{free_reduce, GroupElement, Letter, Mat};
use super::parse::PolyExpr;
use super::poly::{is_identifier, RingCtx, RingElement};
use super::scalar::NLocInt;
use crate::error::{Error, Result};
use crate::primes::prime_factors;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(rename = "N", default)]
    n: Option<u64>,
    #[serde(default)]
    t: Option<usize>,
    #[serde(default)]
    vars: Option<Vec<String>>,
    d: usize,
    generators: Map<String, Value>,
    #[serde(default)]
    inverses: Option<Map<String, Value>>,
    #[serde(default)]
    localizer: Option<String>,
    #[serde(default)]
    density_asserted: bool,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub mat: Mat,
    pub inv: Mat,
}

/// A finitely generated subgroup of `SL_d(Z[1/N][x_1..x_t][1/r])`, given by
/// generators; the symmetric set `X` is the generators and their inverses.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    ctx: RingCtx,
    d: usize,
    gens: Vec<Generator>,
    localizer: RingElement,
    density_asserted: bool,
}

type RawMatrix = Vec<Vec<PolyExpr>>;

fn raw_matrix(name: &str, v: &Value, d: usize) -> Result<RawMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("generator {name}: expected an array of rows")))?;
    if rows.len() != d {
        return Err(Error::DimensionMismatch(d, rows.len()));
    }
    rows.iter()
        .map(|row| {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Parse(format!("generator {name}: row is not an array")))?;
            if row.len() != d {
                return Err(Error::DimensionMismatch(d, row.len()));
            }
            row.iter().map(|e| entry(name, e)).collect()
        })
        .collect()
}

fn entry(name: &str, v: &Value) -> Result<PolyExpr> {
    match v {
        Value::String(s) => PolyExpr::parse(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => PolyExpr::parse(&n.to_string()),
        _ => Err(Error::Parse(format!("generator {name}: entry {v} is not an integer or polynomial string"))),
    }
}

fn lower_matrix(m: &RawMatrix, ctx: &RingCtx) -> Result<Mat> {
    Mat::from_rows(
        m.iter()
            .map(|row| row.iter().map(|e| e.lower(ctx)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Radical of the lcm of all denominators; 2 when there are none.
fn derive_base<'a>(dens: impl Iterator<Item = &'a BigUint>) -> Result<u64> {
    let l = dens.fold(BigUint::one(), |acc, d| acc.lcm(d));
    if l.is_one() {
        return Ok(2);
    }
    let l = l
        .to_u64()
        .ok_or_else(|| Error::Parse("denominators too large to derive N".into()))?;
    Ok(prime_factors(l).iter().product())
}

impl GroupSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        if raw.d < 2 {
            return Err(Error::InvalidArgument(format!("d must be at least 2, got {}", raw.d)));
        }
        let vars = match (raw.vars, raw.t) {
            (Some(v), Some(t)) if v.len() != t => {
                return Err(Error::InvalidArgument(format!("t = {t} but {} variable names", v.len())))
            }
            (Some(v), _) => v,
            (None, t) => (1..=t.unwrap_or(0)).map(|i| format!("x{i}")).collect(),
        };
        if raw.generators.is_empty() {
            return Err(Error::InvalidArgument("no generators".into()));
        }
        let mut gens_raw = Vec::new();
        for (name, v) in &raw.generators {
            gens_raw.push((name.clone(), raw_matrix(name, v, raw.d)?));
        }
        let mut inv_raw = Vec::new();
        if let Some(inv) = &raw.inverses {
            for (name, v) in inv {
                if !raw.generators.contains_key(name) {
                    return Err(Error::UnknownGenerator(name.clone()));
                }
                inv_raw.push((name.clone(), raw_matrix(name, v, raw.d)?));
            }
        }
        let loc_raw = raw.localizer.as_deref().map(PolyExpr::parse).transpose()?;

        let n = match raw.n {
            Some(n) if n >= 2 => n,
            _ => {
                let all = gens_raw
                    .iter()
                    .chain(&inv_raw)
                    .flat_map(|(_, m)| m.iter().flatten())
                    .chain(loc_raw.iter());
                derive_base(all.flat_map(|e| e.denominators()))?
            }
        };
        let ctx = RingCtx::new(n, vars)?;
        let mut gens = Vec::new();
        for (name, m) in gens_raw {
            gens.push((name, lower_matrix(&m, &ctx)?));
        }
        let mut spec = Self::from_generators(ctx.clone(), raw.d, gens, raw.density_asserted)?;
        for (name, m) in inv_raw {
            let given = lower_matrix(&m, &ctx)?;
            let g = spec.gens.iter().find(|g| g.name == name).expect("checked above");
            if !g.mat.mul(&given)?.is_identity() {
                return Err(Error::AsymmetricGenerators(format!(
                    "listed inverse of {name} does not multiply to the identity"
                )));
            }
        }
        if let Some(r) = loc_raw {
            let r = r.lower(&ctx)?;
            spec.localizer = &spec.localizer * &r;
            if spec.localizer.is_zero() {
                return Err(Error::ZeroElement);
            }
        }
        Ok(spec)
    }

    /// Builds a spec from named determinant-one matrices. The localizer is
    /// `N^k` with `k` the largest denominator exponent among the entries,
    /// so it is 1 for integral generators.
    pub fn from_generators(ctx: RingCtx, d: usize, gens: Vec<(String, Mat)>, density_asserted: bool) -> Result<Self> {
        let mut out: Vec<Generator> = Vec::with_capacity(gens.len());
        let mut kmax = 0u32;
        for (name, mat) in gens {
            if name == "x" {
                return Err(Error::ReservedName(name));
            }
            if !is_identifier(&name) {
                return Err(Error::Parse(format!("generator name {name:?} is not an identifier")));
            }
            if ctx.vars().contains(&name) || out.iter().any(|g| g.name == name) {
                return Err(Error::InvalidArgument(format!("generator name {name:?} is already in use")));
            }
            if mat.dim() != d {
                return Err(Error::DimensionMismatch(d, mat.dim()));
            }
            for e in mat.entries() {
                ctx.check(e)?;
                kmax = kmax.max(e.terms().map(|(_, c)| c.exponent()).max().unwrap_or(0));
            }
            let inv = mat.inverse()?;
            out.push(Generator { name, mat, inv });
        }
        let localizer = RingElement::constant(
            ctx.n(),
            ctx.t(),
            NLocInt::integer(num_bigint::BigInt::from(ctx.n()).pow(kmax)),
        );
        Ok(GroupSpec { ctx, d, gens: out, localizer, density_asserted })
    }

    pub fn ctx(&self) -> &RingCtx {
        &self.ctx
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn localizer(&self) -> &RingElement {
        &self.localizer
    }

    pub fn density_asserted(&self) -> bool {
        self.density_asserted
    }

    /// The symmetric generating set `X`: each generator followed by its inverse.
    pub fn letters(&self) -> Vec<Letter> {
        (0..self.gens.len())
            .flat_map(|i| [Letter::new(i, false), Letter::new(i, true)])
            .collect()
    }

    pub fn letter_mat(&self, l: Letter) -> &Mat {
        let g = &self.gens[l.generator()];
        if l.is_inverse() {
            &g.inv
        } else {
            &g.mat
        }
    }

    pub fn letter_element(&self, l: Letter) -> GroupElement {
        GroupElement::from_parts(self.letter_mat(l).clone(), Some(vec![l]))
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(&self.ctx, self.d)
    }

    /// Product of the letters, left to right.
    pub fn element(&self, word: &[Letter]) -> GroupElement {
        let word = free_reduce(word);
        let mut mat = Mat::identity(&self.ctx, self.d);
        for &l in &word {
            mat = mat.mul(self.letter_mat(l)).expect("dimensions agree within a spec");
        }
        GroupElement::from_parts(mat, Some(word))
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let name = &self.gens[l.generator()].name;
        if l.is_inverse() {
            format!("{name}^-1")
        } else {
            name.clone()
        }
    }

    /// Renders a letter sequence with runs compressed, e.g. `A^2 B^-1`.
    pub fn word_to_string(&self, word: &[Letter]) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < word.len() {
            let g = word[i].generator();
            let mut e: i64 = 0;
            while i < word.len() && word[i].generator() == g {
                e += if word[i].is_inverse() { -1 } else { 1 };
                i += 1;
            }
            if e != 0 {
                parts.push(power_token(&self.gens[g].name, e));
            }
        }
        parts.join(" ")
    }

    /// `σ1, σ2`: the first two generators that are nontrivial, distinct and not
    /// mutually inverse.
    pub fn sigma_pair(&self) -> Result<(Letter, Letter)> {
        let ok: Vec<usize> = (0..self.gens.len()).filter(|&i| !self.gens[i].mat.is_identity()).collect();
        for (a, &i) in ok.iter().enumerate() {
            for &j in &ok[a + 1..] {
                let (gi, gj) = (&self.gens[i], &self.gens[j]);
                if gi.mat != gj.mat && gi.inv != gj.mat {
                    return Ok((Letter::new(i, false), Letter::new(j, false)));
                }
            }
        }
        Err(Error::InvalidArgument("need two distinct nontrivial generators".into()))
    }

    /// Serializes back into the document format with every entry as a string.
    pub fn to_json(&self) -> Value {
        let mut gens = Map::new();
        for g in &self.gens {
            gens.insert(g.name.clone(), mat_json(&g.mat, self.ctx.vars()));
        }
        let mut doc = Map::new();
        doc.insert("N".into(), self.ctx.n().into());
        doc.insert("t".into(), self.ctx.t().into());
        doc.insert("vars".into(), self.ctx.vars().to_vec().into());
        doc.insert("d".into(), self.d.into());
        doc.insert("generators".into(), Value::Object(gens));
        if !self.localizer.is_one() {
            doc.insert("localizer".into(), self.localizer.to_string_with(self.ctx.vars()).into());
        }
        doc.insert("density_asserted".into(), self.density_asserted.into());
        Value::Object(doc)
    }
}

fn mat_json(m: &Mat, vars: &[String]) -> Value {
    let d = m.dim();
    Value::Array(
        (0..d)
            .map(|i| Value::Array((0..d).map(|j| Value::String(m.get(i, j).to_string_with(vars))).collect()))
            .collect(),
    )
}

pub(crate) fn power_token(name: &str, e: i64) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{name}^{e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::free_pair;

    const FREE_PAIR: &str = r#"{"N": 1, "t": 0, "vars": [], "d": 2,
        "generators": {"A": [["1","2"],["0","1"]], "B": [[1,0],[2,1]]}}"#;

    #[test]
    fn free_pair_document() {
        let s = GroupSpec::parse(FREE_PAIR).unwrap();
        assert_eq!(s.ctx().n(), 2);
        assert_eq!(s.letters().len(), 4);
        assert!(s.localizer().is_one());
        assert!(!s.density_asserted());
        let a = s.letter_mat(Letter(1));
        assert_eq!(s.letter_mat(Letter(-1)), &a.inverse().unwrap());
        assert_eq!(s.sigma_pair().unwrap(), (Letter(1), Letter(2)));
    }

    #[test]
    fn family_document() {
        let s = GroupSpec::parse(
            r#"{"t": 1, "d": 2, "generators": {"A": [["1","x1"],["0","1"]], "B": [["1","0"],["2","1"]]},
                "density_asserted": true}"#,
        )
        .unwrap();
        assert!(s.localizer().is_one());
        assert_eq!(s.ctx().t(), 1);
        assert!(s.density_asserted());
        let again = GroupSpec::parse(&s.to_json().to_string()).unwrap();
        assert_eq!(again.generators()[0].mat, s.generators()[0].mat);
    }

    #[test]
    fn rejects_bad_documents() {
        let det2 = r#"{"d": 2, "generators": {"A": [[2,0],[0,1]]}}"#;
        assert!(matches!(GroupSpec::parse(det2), Err(Error::Determinant(_))));
        let reserved = r#"{"d": 2, "generators": {"x": [[1,1],[0,1]]}}"#;
        assert!(matches!(GroupSpec::parse(reserved), Err(Error::ReservedName(_))));
        let var_x = r#"{"d": 2, "vars": ["x"], "generators": {"A": [[1,1],[0,1]]}}"#;
        assert!(matches!(GroupSpec::parse(var_x), Err(Error::ReservedName(_))));
        let bad_poly = r#"{"d": 2, "t": 1, "generators": {"A": [["1","x1+"],["0","1"]]}}"#;
        assert!(matches!(GroupSpec::parse(bad_poly), Err(Error::Parse(_))));
        let asym = r#"{"d": 2, "generators": {"A": [[1,1],[0,1]]}, "inverses": {"A": [[1,1],[0,1]]}}"#;
        assert!(matches!(GroupSpec::parse(asym), Err(Error::AsymmetricGenerators(_))));
        let unknown = r#"{"d": 2, "generators": {"A": [[1,1],[0,1]]}, "colour": 3}"#;
        assert!(GroupSpec::parse(unknown).is_err());
        let wrong_dim = r#"{"d": 2, "generators": {"A": [[1,1,0],[0,1,0],[0,0,1]]}}"#;
        assert!(matches!(GroupSpec::parse(wrong_dim), Err(Error::DimensionMismatch(..))));
    }

    #[test]
    fn derives_base_from_denominators() {
        let s = GroupSpec::parse(r#"{"d": 2, "generators": {"D": [["2","0"],["0","1/2"]], "T": [[1,1],[0,1]]}}"#)
            .unwrap();
        assert_eq!(s.ctx().n(), 2);
        assert_eq!(s.localizer().to_string(), "2");
        let s = GroupSpec::parse(r#"{"d": 2, "generators": {"D": [["12","0"],["0","1/12"]]}}"#).unwrap();
        assert_eq!(s.ctx().n(), 6);
        let ok = r#"{"d": 2, "generators": {"A": [[1,1],[0,1]]}, "inverses": {"A": [[1,-1],[0,1]]}, "localizer": "3"}"#;
        let s = GroupSpec::parse(ok).unwrap();
        assert_eq!(s.localizer().to_string(), "3");
    }

    #[test]
    fn words_and_rendering() {
        let s = free_pair();
        let w = [Letter(1), Letter(1), Letter(-2), Letter(2), Letter(-2), Letter(1)];
        let g = s.element(&w);
        assert_eq!(g.word().unwrap(), &[Letter(1), Letter(1), Letter(-2), Letter(1)]);
        assert_eq!(s.word_to_string(g.word().unwrap()), "A^2 B^-1 A");
        let mut direct = s.identity();
        for &l in &w {
            direct.mul_assign(&s.letter_element(l)).unwrap();
        }
        assert!(direct.same_matrix(&g));
    }
}
