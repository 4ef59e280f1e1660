//! JSON file formats. Rationals and coefficients travel as strings in the
//! coefficient grammar (`3/2*L^2 - 1`); plain integers are accepted on input.

use std::collections::BTreeMap;
use std::path::Path;

use operad_forge_core::cochain::DifBimoduleData;
use operad_forge_core::free_operad::{OperadElement, TreeMonomial};
use operad_forge_core::hda::{d_degree, m_degree, HdaStructure};
use operad_forge_core::hom_complex::{GradedSpace, MultiMap};
use operad_forge_core::linf_def::{CdaElement, DifAlgebraData, Part};
use operad_forge_core::{Coefficient, Degree, Lambda, Rational};
use serde::{Deserialize, Serialize};

/// Malformed input; the CLI turns this into a usage error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError(pub String);

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FormatError {}

impl From<operad_forge_core::Error> for FormatError {
    fn from(e: operad_forge_core::Error) -> Self {
        FormatError(e.to_string())
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError(format!("malformed JSON: {e}"))
    }
}

pub type FormatResult<T> = Result<T, FormatError>;

/// A scalar written either as a string or as a JSON integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    fn rational(&self) -> FormatResult<Rational> {
        match self {
            Scalar::Int(n) => Ok(Rational::from_int(*n)),
            Scalar::Text(s) => Ok(Rational::parse(s)?),
        }
    }

    fn coefficient(&self) -> FormatResult<Coefficient> {
        match self {
            Scalar::Int(n) => Ok(Coefficient::from_int(*n)),
            Scalar::Text(s) => Ok(Coefficient::parse(s)?),
        }
    }
}

fn default_lambda() -> String {
    "generic".to_string()
}

pub fn parse_lambda(s: &str) -> FormatResult<Lambda> {
    Lambda::parse(s).map_err(|_| FormatError(format!("lambda must be `generic` or a rational, got {s:?}")))
}

pub fn read_file(path: &Path) -> FormatResult<String> {
    std::fs::read_to_string(path).map_err(|e| FormatError(format!("cannot read {}: {e}", path.display())))
}

// ---------------------------------------------------------------- algebras

/// `{ "dim": n, "basis": [...], "mult": [[[q,...],...],...], "d": [[q,...],...], "lambda": "1" }`.
/// `mult[i][j]` is `e_i e_j` and `d[i]` is `d(e_i)`, both in the basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub dim: usize,
    #[serde(default)]
    pub basis: Vec<String>,
    pub mult: Vec<Vec<Vec<Scalar>>>,
    pub d: Vec<Vec<Scalar>>,
    #[serde(default = "default_lambda")]
    pub lambda: String,
}

fn check_len<T>(v: &[T], n: usize, what: &str) -> FormatResult<()> {
    if v.len() != n {
        return Err(FormatError(format!("{what}: expected {n} entries, found {}", v.len())));
    }
    Ok(())
}

fn rational_table2(t: &[Vec<Scalar>], rows: usize, cols: usize, what: &str) -> FormatResult<Vec<Vec<Rational>>> {
    check_len(t, rows, what)?;
    t.iter()
        .enumerate()
        .map(|(i, row)| {
            check_len(row, cols, &format!("{what}[{i}]"))?;
            row.iter().map(Scalar::rational).collect()
        })
        .collect()
}

fn rational_table3(t: &[Vec<Vec<Scalar>>], a: usize, b: usize, c: usize, what: &str) -> FormatResult<Vec<Vec<Vec<Rational>>>> {
    check_len(t, a, what)?;
    t.iter().enumerate().map(|(i, m)| rational_table2(m, b, c, &format!("{what}[{i}]"))).collect()
}

impl AlgebraFile {
    pub fn parse(text: &str) -> FormatResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Builds the algebra; `lambda` overrides the file's weight when given.
    pub fn to_data(&self, lambda: Option<&Lambda>) -> FormatResult<DifAlgebraData> {
        let n = self.dim;
        if n == 0 {
            return Err(FormatError("algebra: dim must be positive".into()));
        }
        if !self.basis.is_empty() {
            check_len(&self.basis, n, "basis")?;
        }
        let mult = rational_table3(&self.mult, n, n, n, "mult")?;
        let d = rational_table2(&self.d, n, n, "d")?;
        let lam = match lambda {
            Some(l) => l.clone(),
            None => parse_lambda(&self.lambda)?,
        };
        Ok(DifAlgebraData::from_tables(&mult, &d, lam)?)
    }

    pub fn load(path: &Path) -> FormatResult<Self> {
        Self::parse(&read_file(path)?)
    }
}

/// `{ "dim": k, "basis": [...], "left": ..., "right": ..., "d": ... }` with
/// `left[i][x]` = `e_i · m_x`, `right[x][i]` = `m_x · e_i`, `d[x]` = `d_M(m_x)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BimoduleFile {
    pub dim: usize,
    #[serde(default)]
    pub basis: Vec<String>,
    pub left: Vec<Vec<Vec<Scalar>>>,
    pub right: Vec<Vec<Vec<Scalar>>>,
    pub d: Vec<Vec<Scalar>>,
}

impl BimoduleFile {
    pub fn parse(text: &str) -> FormatResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> FormatResult<Self> {
        Self::parse(&read_file(path)?)
    }

    pub fn to_data(&self, algebra: &DifAlgebraData) -> FormatResult<DifBimoduleData> {
        let a = algebra.dim();
        let k = self.dim;
        if k == 0 {
            return Err(FormatError("bimodule: dim must be positive".into()));
        }
        if !self.basis.is_empty() {
            check_len(&self.basis, k, "basis")?;
        }
        let left = rational_table3(&self.left, a, k, k, "left")?;
        let right = rational_table3(&self.right, k, a, k, "right")?;
        let d = rational_table2(&self.d, k, k, "d")?;
        Ok(DifBimoduleData::new(algebra, &left, &right, &d)?)
    }
}

// ---------------------------------------------------------- graded spaces

/// `{ "dims": {"0": 2, "1": 1}, "labels": [...] }`; the basis is ordered by degree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradedSpaceFile {
    pub dims: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

impl GradedSpaceFile {
    pub fn to_space(&self) -> FormatResult<GradedSpace> {
        let mut dims = BTreeMap::new();
        for (k, &n) in &self.dims {
            let d: Degree = k.trim().parse().map_err(|_| FormatError(format!("dims: bad degree {k:?}")))?;
            dims.insert(d, n);
        }
        let base = GradedSpace::from_dims(&dims);
        if self.labels.is_empty() {
            return Ok(base);
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &self.labels {
            if l.is_empty() || l.contains(',') || !seen.insert(l) {
                return Err(FormatError(format!("labels: {l:?} is empty, repeated or contains a comma")));
            }
        }
        Ok(GradedSpace::with_labels(base.degrees().to_vec(), self.labels.clone())?)
    }

    pub fn from_space(v: &GradedSpace) -> Self {
        GradedSpaceFile {
            dims: v.dims().into_iter().map(|(d, n)| (d.to_string(), n)).collect(),
            labels: v.labels().to_vec(),
        }
    }
}

// ------------------------------------------------------------- multimaps

/// Coordinate table: `"x,y"` (input basis labels) to output label to coefficient.
pub type MapTable = BTreeMap<String, BTreeMap<String, Scalar>>;

fn label_index(v: &GradedSpace, label: &str) -> FormatResult<usize> {
    v.labels()
        .iter()
        .position(|l| l == label.trim())
        .ok_or_else(|| FormatError(format!("unknown basis label {label:?}")))
}

/// Reads a table into a map `src^{⊗n} → tgt` of the given degree. Entries that
/// the grading forbids are rejected rather than dropped.
pub fn table_to_map(table: &MapTable, src: &GradedSpace, tgt: &GradedSpace, arity: usize, degree: Degree) -> FormatResult<MultiMap> {
    let mut m = MultiMap::zero(src, tgt, arity, degree);
    for (key, outs) in table {
        let tuple: Vec<usize> =
            if arity == 0 { Vec::new() } else { key.split(',').map(|l| label_index(src, l)).collect::<FormatResult<_>>()? };
        if tuple.len() != arity {
            return Err(FormatError(format!("tuple {key:?} does not have {arity} entries")));
        }
        for (out, c) in outs {
            let o = label_index(tgt, out)?;
            let c = c.coefficient()?;
            if c.is_zero() {
                continue;
            }
            if !m.admissible(&tuple, o) {
                return Err(FormatError(format!("entry {key:?} -> {out:?} breaks the grading of a degree {degree} map")));
            }
            m.set(&tuple, o, c)?;
        }
    }
    Ok(m)
}

pub fn map_to_table(m: &MultiMap) -> MapTable {
    let mut t = MapTable::new();
    for (tuple, o, c) in m.nonzero_entries() {
        let key = tuple.iter().map(|&i| m.src().labels()[i].as_str()).collect::<Vec<_>>().join(",");
        t.entry(key).or_default().insert(m.tgt().labels()[o].clone(), Scalar::Text(c.to_string()));
    }
    t
}

/// One line per nonzero entry, `x,y -> z: c`.
pub fn map_lines(m: &MultiMap) -> Vec<String> {
    map_to_table(m)
        .into_iter()
        .flat_map(|(k, outs)| {
            outs.into_iter().map(move |(o, c)| {
                let c = match c {
                    Scalar::Text(s) => s,
                    Scalar::Int(n) => n.to_string(),
                };
                format!("{k} -> {o}: {c}")
            })
        })
        .collect()
}

pub fn element_lines(x: &CdaElement) -> Vec<String> {
    let mut out = Vec::new();
    for (p, m) in x.components() {
        if m.is_zero() {
            continue;
        }
        let part = match p {
            Part::Alg => "Alg",
            Part::Do => "Do",
        };
        out.push(format!("{part} part, arity {}:", m.arity()));
        out.extend(map_lines(m).into_iter().map(|l| format!("  {l}")));
    }
    out
}

// ------------------------------------------------------------ structures

/// A homotopy differential algebra with weight: graded dims, the weight and
/// coordinate tables for `m_n` and `d_n`, keyed by arity.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub space: GradedSpaceFile,
    #[serde(default = "default_lambda")]
    pub lambda: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_arity: Option<usize>,
    #[serde(default)]
    pub m: BTreeMap<String, MapTable>,
    #[serde(default)]
    pub d: BTreeMap<String, MapTable>,
}

fn arity_key(k: &str) -> FormatResult<usize> {
    match k.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(FormatError(format!("arity key {k:?} is not a positive integer"))),
    }
}

impl StructureFile {
    pub fn parse(text: &str) -> FormatResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> FormatResult<Self> {
        Self::parse(&read_file(path)?)
    }

    pub fn to_structure(&self, lambda: Option<&Lambda>) -> FormatResult<HdaStructure> {
        let v = self.space.to_space()?;
        if v.dim() == 0 {
            return Err(FormatError("structure: the space is zero".into()));
        }
        let lam = match lambda {
            Some(l) => l.clone(),
            None => parse_lambda(&self.lambda)?,
        };
        let keys = self.m.keys().chain(self.d.keys()).map(|k| arity_key(k)).collect::<FormatResult<Vec<_>>>()?;
        let top = keys.iter().copied().max().unwrap_or(1).max(self.max_arity.unwrap_or(1));
        let mut s = HdaStructure::zero(&v, lam, top);
        for (k, t) in &self.m {
            let n = arity_key(k)?;
            s.set_m(n, table_to_map(t, &v, &v, n, m_degree(n))?)?;
        }
        for (k, t) in &self.d {
            let n = arity_key(k)?;
            s.set_d(n, table_to_map(t, &v, &v, n, d_degree(n))?)?;
        }
        Ok(s)
    }

    pub fn from_structure(s: &HdaStructure) -> Self {
        let tables = |f: &dyn Fn(usize) -> MultiMap| {
            (1..=s.max_arity())
                .filter_map(|n| {
                    let t = map_to_table(&f(n));
                    (!t.is_empty()).then(|| (n.to_string(), t))
                })
                .collect()
        };
        StructureFile {
            space: GradedSpaceFile::from_space(s.space()),
            lambda: s.lambda().to_string(),
            max_arity: Some(s.max_arity()),
            m: tables(&|n| s.m(n).clone()),
            d: tables(&|n| s.d(n).clone()),
        }
    }
}

// ------------------------------------------------------ operad elements

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub coeff: String,
    pub tree: String,
}

pub fn parse_element(text: &str) -> FormatResult<OperadElement> {
    let records: Vec<TermRecord> = serde_json::from_str(text)?;
    let mut x = OperadElement::zero();
    for r in records {
        let t = TreeMonomial::parse(&r.tree)?;
        let c = Coefficient::parse(&r.coeff)?;
        x.add_term(t, &c)?;
    }
    Ok(x)
}

pub fn element_records(x: &OperadElement) -> Vec<TermRecord> {
    x.terms().map(|(t, c)| TermRecord { coeff: c.to_string(), tree: t.to_string() }).collect()
}

/// Canonical text form; `parse_element(print_element(x)) == x`.
pub fn print_element(x: &OperadElement) -> String {
    let mut s = serde_json::to_string_pretty(&element_records(x)).expect("records serialize");
    s.push('\n');
    s
}
