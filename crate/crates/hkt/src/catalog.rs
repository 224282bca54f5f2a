//! Built-in reference structures with expected classification flags,
//! direct-sum products, and the versioned JSON entry format.
//!
//! Entry file (exact rationals as strings, 1-based bracket indices):
//!
//! ```json
//! {"version": 1, "name": "hopf_su2_r", "dim": 4,
//!  "brackets": [[1, 2, 3, "1"], [2, 3, 1, "1"], [3, 1, 2, "1"]],
//!  "metric": [["1","0","0","0"], ...],
//!  "I": [[...]], "J": [[...]], "K": [[...]],
//!  "expected": {"hkt": true}}
//! ```
//!
//! `[[i, j, k, c]]` means `[e_i, e_j]` has coefficient `c` on `e_k`; the
//! antisymmetric completion is implied and duplicates are rejected. `K`
//! defaults to `I·J`; an entry with only `I` is a Hermitian (complex-only)
//! entry. Scalars may also be written with one square root, e.g.
//! `"sqrt(3)/2"` or `"1/2-3/4*sqrt(5)"`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::hermitian::{HermitianData, HermitianError};
use crate::linalg::Mat;
use crate::liealg::{su2, LieAlgebra, LieError};
use crate::multilinear::{Endomorphism, Metric};
use crate::quaternionic::{block_triple, standard_triple, HyperHermitianData, QuaternionicError};
use crate::scalar::{Exact, Scalar};

/// Current entry-file format version.
pub const FORMAT_VERSION: u64 = 1;

/// Flag names accepted in the `expected` map.
pub const KNOWN_FLAGS: &[&str] = &[
    "hkt",
    "strong_hkt",
    "hyperkahler",
    "balanced",
    "parallel_torsion",
    "kahler",
    "skt",
    "cyt",
    "bhe",
    "generalized_einstein",
    "bismut_flat",
];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{path}: cannot read or write file: {msg}")]
    Io { path: String, msg: String },
    #[error("JSON syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("field `{field}`: {msg}")]
    Field { field: String, msg: String },
    #[error("invalid Lie algebra: {0}")]
    Lie(#[from] LieError),
    #[error("invalid metric: {0}")]
    Metric(String),
    #[error("invalid hyper-Hermitian structure: {0}")]
    Quaternionic(#[from] QuaternionicError),
    #[error("invalid Hermitian structure: {0}")]
    Hermitian(#[from] HermitianError),
    #[error("product of a hyper-Hermitian and a complex-only entry is not defined")]
    MixedKinds,
    #[error("unknown catalog entry `{0}`")]
    Unknown(String),
}

fn field_err(field: impl Into<String>, msg: impl Into<String>) -> CatalogError {
    CatalogError::Field {
        field: field.into(),
        msg: msg.into(),
    }
}

/// The geometric data of an entry.
#[derive(Clone, Debug)]
pub enum EntryData<S: Scalar> {
    Hyper(HyperHermitianData<S>),
    Complex(HermitianData<S>),
}

impl<S: Scalar> EntryData<S> {
    pub fn dim(&self) -> usize {
        self.algebra().dim()
    }

    pub fn algebra(&self) -> &LieAlgebra<S> {
        match self {
            EntryData::Hyper(q) => &q.algebra,
            EntryData::Complex(h) => &h.algebra,
        }
    }

    pub fn metric(&self) -> &Metric<S> {
        match self {
            EntryData::Hyper(q) => &q.g,
            EntryData::Complex(h) => &h.g,
        }
    }

    /// The Hermitian structures carried by the entry (`I, J, K` or `J`).
    pub fn hermitian_structures(&self) -> Vec<HermitianData<S>> {
        match self {
            EntryData::Hyper(q) => (0..3).map(|w| q.hermitian(w)).collect(),
            EntryData::Complex(h) => vec![h.clone()],
        }
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> EntryData<T> {
        match self {
            EntryData::Hyper(q) => EntryData::Hyper(q.convert(f)),
            EntryData::Complex(h) => EntryData::Complex(h.convert(f)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry<S: Scalar> {
    pub name: String,
    pub data: EntryData<S>,
    /// Expected flag values (the regression contract).
    pub expected: BTreeMap<String, bool>,
    pub provenance: String,
}

impl<S: Scalar> CatalogEntry<S> {
    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn is_hyper(&self) -> bool {
        matches!(self.data, EntryData::Hyper(_))
    }

    pub fn hyper(&self) -> Option<&HyperHermitianData<S>> {
        match &self.data {
            EntryData::Hyper(q) => Some(q),
            EntryData::Complex(_) => None,
        }
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> CatalogEntry<T> {
        CatalogEntry {
            name: self.name.clone(),
            data: self.data.convert(f),
            expected: self.expected.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

impl CatalogEntry<Exact> {
    /// Floating-point copy.
    pub fn to_float(&self) -> CatalogEntry<crate::scalar::Float> {
        self.convert(|x| crate::scalar::Float::from_exact(x))
    }
}

fn expected(pairs: &[(&str, bool)]) -> BTreeMap<String, bool> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn ex(s: &str) -> Exact {
    Exact::from_str(s).expect("valid built-in literal")
}

fn mat_from_ints(rows: &[[i64; 8]]) -> Mat<Exact> {
    Mat::from_rows(rows.iter().map(|r| r.iter().map(|&v| Exact::int(v)).collect()).collect())
}

fn algebra_from(n: usize, entries: &[(usize, usize, usize, &str)]) -> LieAlgebra<Exact> {
    let list: Vec<(usize, usize, usize, Exact)> = entries
        .iter()
        .map(|&(i, j, k, v)| (i - 1, j - 1, k - 1, ex(v)))
        .collect();
    let alg = LieAlgebra::from_brackets(n, &list).expect("valid built-in brackets");
    alg.validate().expect("built-in algebra satisfies Jacobi");
    alg
}

fn hyper_entry(
    name: &str,
    q: HyperHermitianData<Exact>,
    exp: &[(&str, bool)],
    provenance: &str,
) -> CatalogEntry<Exact> {
    CatalogEntry {
        name: name.to_string(),
        data: EntryData::Hyper(q),
        expected: expected(exp),
        provenance: provenance.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Built-in entries
// ---------------------------------------------------------------------------

/// `su(3)` with the bi-invariant metric `g = −¼·B` (B the Killing form) in
/// the orthonormal basis `X_a = −(i/2)λ_a` of Gell-Mann matrices, and a
/// Joyce hypercomplex structure: the `su(2)` triple `X_1, X_2, X_3` together
/// with the Cartan direction `X_8` forms a quaternion line
/// `X_8 ↔ 1, X_1 ↔ i, X_2 ↔ j, X_3 ↔ k` (`L` acting by left multiplication),
/// and on the complementary module `span{X_4..X_7}` the structure `L` acts
/// as `2·ad(X_L)`. With this metric the Euler field has unit length
/// (`V = −X_8`).
pub fn su3_samelson() -> CatalogEntry<Exact> {
    const S: &str = "sqrt(3)/2";
    const MS: &str = "-sqrt(3)/2";
    let alg = algebra_from(
        8,
        &[
            (1, 2, 3, "1"),
            (1, 3, 2, "-1"),
            (1, 4, 7, "1/2"),
            (1, 5, 6, "-1/2"),
            (1, 6, 5, "1/2"),
            (1, 7, 4, "-1/2"),
            (2, 3, 1, "1"),
            (2, 4, 6, "1/2"),
            (2, 5, 7, "1/2"),
            (2, 6, 4, "-1/2"),
            (2, 7, 5, "-1/2"),
            (3, 4, 5, "1/2"),
            (3, 5, 4, "-1/2"),
            (3, 6, 7, "-1/2"),
            (3, 7, 6, "1/2"),
            (4, 5, 3, "1/2"),
            (4, 5, 8, S),
            (4, 6, 2, "1/2"),
            (4, 7, 1, "1/2"),
            (4, 8, 5, MS),
            (5, 6, 1, "-1/2"),
            (5, 7, 2, "1/2"),
            (5, 8, 4, S),
            (6, 7, 3, "-1/2"),
            (6, 7, 8, S),
            (6, 8, 7, MS),
            (7, 8, 6, S),
        ],
    );
    let i = mat_from_ints(&[
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, -1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, -1, 0],
        [0, 0, 0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, -1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 0],
        [-1, 0, 0, 0, 0, 0, 0, 0],
    ]);
    let j = mat_from_ints(&[
        [0, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [-1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 0, 0, -1, 0],
        [0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, -1, 0, 0, 0, 0, 0, 0],
    ]);
    let k = mat_from_ints(&[
        [0, -1, 0, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, -1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, -1, 0, 0],
        [0, 0, -1, 0, 0, 0, 0, 0],
    ]);
    let q = HyperHermitianData::new(alg, Metric::identity(8), i, j, k).expect("su(3) Joyce triple");
    hyper_entry(
        "su3_samelson",
        q,
        &[
            ("hkt", true),
            ("strong_hkt", true),
            ("parallel_torsion", true),
            ("hyperkahler", false),
            ("balanced", false),
            ("bismut_flat", true),
        ],
        "hyper-Hermitian Samelson space SU(3) with a Joyce hypercomplex structure",
    )
}

/// `su(2) ⊕ ℝ` (`[e1,e2]=e3` cyclic, `e4` central) with the identity metric
/// and the quaternion triple `e4 ↔ 1, e1 ↔ i, e2 ↔ j, e3 ↔ k`.
pub fn hopf_q() -> HyperHermitianData<Exact> {
    let alg = su2::<Exact>().direct_sum(&LieAlgebra::abelian(1));
    let (i, j, k) = standard_triple::<Exact>();
    let p = Mat::from_fn(4, 4, |r, c| if r == (c + 3) % 4 { Exact::int(1) } else { Exact::int(0) });
    let pinv = p.transpose();
    let conj = |m: &Mat<Exact>| p.mul(m).mul(&pinv);
    HyperHermitianData::new(alg, Metric::identity(4), conj(&i), conj(&j), conj(&k)).expect("Hopf triple")
}

pub fn hopf_su2_r() -> CatalogEntry<Exact> {
    hyper_entry(
        "hopf_su2_r",
        hopf_q(),
        &[
            ("hkt", true),
            ("strong_hkt", true),
            ("parallel_torsion", true),
            ("hyperkahler", false),
            ("balanced", false),
            ("bismut_flat", true),
        ],
        "Hopf surface S^3 × S^1 as the Samelson space SU(2) × R",
    )
}

/// Direct sum of two hopf_su2_r factors with block metric and structures.
pub fn hopf_x_hopf() -> CatalogEntry<Exact> {
    let h = hopf_su2_r();
    let mut e = product(&h, &h).expect("product of hyper entries");
    e.name = "hopf_x_hopf".to_string();
    e.provenance = "product of two Hopf factors (su(2) ⊕ ℝ)²".to_string();
    e
}

pub fn abelian_r4() -> CatalogEntry<Exact> {
    let (i, j, k) = standard_triple::<Exact>();
    let q = HyperHermitianData::new(LieAlgebra::abelian(4), Metric::identity(4), i, j, k).expect("flat ℍ");
    hyper_entry(
        "abelian_r4",
        q,
        &[
            ("hkt", true),
            ("strong_hkt", true),
            ("hyperkahler", true),
            ("balanced", true),
            ("parallel_torsion", true),
            ("bismut_flat", true),
        ],
        "flat quaternionic line",
    )
}

pub fn abelian_r8() -> CatalogEntry<Exact> {
    let (i, j, k) = block_triple::<Exact>(2);
    let q = HyperHermitianData::new(LieAlgebra::abelian(8), Metric::identity(8), i, j, k).expect("flat ℍ²");
    hyper_entry(
        "abelian_r8",
        q,
        &[
            ("hkt", true),
            ("strong_hkt", true),
            ("hyperkahler", true),
            ("balanced", true),
            ("parallel_torsion", true),
            ("bismut_flat", true),
        ],
        "flat hyper-Kähler ℍ²",
    )
}

/// 2-step nilpotent algebra on `ℍ ⊕ ℍ` (basis `e1..e4`, `e5..e8`, each a
/// copy of `1, i, j, k`) with the abelian hypercomplex structure of left
/// multiplication: `[X, Y] = ω'(X, Y)·e6` for `X, Y` in the first factor,
/// where `ω'(X, Y) = ⟨X·i, Y⟩` is the Kähler form of right multiplication by
/// `i` (commuting with `I, J, K`), i.e. `[e1,e2] = e6`, `[e3,e4] = −e6`. The
/// structure is balanced HKT with Bismut-parallel torsion and is not strong.
pub fn dotti_fino_nilpotent() -> CatalogEntry<Exact> {
    let alg = algebra_from(8, &[(1, 2, 6, "1"), (3, 4, 6, "-1")]);
    let (i, j, k) = block_triple::<Exact>(2);
    let q = HyperHermitianData::new(alg, Metric::identity(8), i, j, k).expect("abelian hypercomplex structure");
    hyper_entry(
        "dotti_fino_nilpotent",
        q,
        &[
            ("hkt", true),
            ("balanced", true),
            ("parallel_torsion", true),
            ("strong_hkt", false),
            ("hyperkahler", false),
        ],
        "balanced HKT nilmanifold with parallel Bismut torsion (abelian hypercomplex structure on a 2-step nilpotent algebra)",
    )
}

/// Almost-abelian `ℝ ⋉_A ℝ³` on `ℍ` (`e1 ↔ 1` acting, `e2, e3, e4 ↔ i, j, k`)
/// with `A = α·Id` and the left-multiplication triple.
pub fn almost_abelian_4(alpha: &Exact) -> CatalogEntry<Exact> {
    let mut list = Vec::new();
    if !alpha.is_zero() {
        for t in 1..4 {
            list.push((0usize, t, t, alpha.clone()));
        }
    }
    let alg = LieAlgebra::from_brackets(4, &list).expect("valid brackets");
    let (i, j, k) = standard_triple::<Exact>();
    let q = HyperHermitianData::new(alg, Metric::identity(4), i, j, k).expect("integrable triple");
    let hk = alpha.is_zero();
    hyper_entry(
        &format!("almost_abelian_4_{}", slug(alpha)),
        q,
        &[("hkt", true), ("strong_hkt", hk), ("hyperkahler", hk)],
        "almost-abelian solvable family in dimension 4",
    )
}

/// Almost-abelian `ℝ ⋉_A ℝ⁷` on `ℍ²` (`e1 ↔ 1` acting on `e2..e8`) with
/// `A = diag(α·Id₃, μ·Id₄ + R_u)`, `R_u` right multiplication by the pure
/// quaternion `u` on the second factor, and the block left-multiplication
/// triple.
pub fn almost_abelian_8(alpha: i64, mu: i64, u: [i64; 3], expect: &[(&str, bool)]) -> CatalogEntry<Exact> {
    let mut a = Mat::<Exact>::zeros(7, 7);
    for t in 0..3 {
        a.set(t, t, Exact::int(alpha));
    }
    // right multiplication by u = u1 i + u2 j + u3 k on the basis 1, i, j, k
    let r = [
        [0, -u[0], -u[1], -u[2]],
        [u[0], 0, u[2], -u[1]],
        [u[1], -u[2], 0, u[0]],
        [u[2], u[1], -u[0], 0],
    ];
    for (row, rr) in r.iter().enumerate() {
        for (col, v) in rr.iter().enumerate() {
            let d = if row == col { mu } else { 0 };
            a.set(3 + row, 3 + col, Exact::int(v + d));
        }
    }
    let mut list = Vec::new();
    for col in 0..7 {
        for row in 0..7 {
            let v = a.get(row, col);
            if !v.is_zero() {
                list.push((0usize, col + 1, row + 1, v.clone()));
            }
        }
    }
    let alg = LieAlgebra::from_brackets(8, &list).expect("valid brackets");
    let (i, j, k) = block_triple::<Exact>(2);
    let q = HyperHermitianData::new(alg, Metric::identity(8), i, j, k).expect("integrable triple");
    hyper_entry(
        &format!("almost_abelian_8_{}_{}_{}{}{}", alpha, mu, u[0], u[1], u[2]).replace('-', "m"),
        q,
        expect,
        "almost-abelian solvable family in dimension 8",
    )
}

fn slug(x: &Exact) -> String {
    x.to_string().replace('/', "_").replace('-', "m")
}

/// The almost-abelian solvable family (nine instances).
pub fn almost_abelian_family() -> Vec<CatalogEntry<Exact>> {
    let mut out: Vec<CatalogEntry<Exact>> = ["0", "1", "2", "-1/2", "3"]
        .iter()
        .map(|a| almost_abelian_4(&ex(a)))
        .collect();
    let not_strong = [("hkt", true), ("strong_hkt", false), ("hyperkahler", false)];
    let not_hkt = [("hkt", false), ("strong_hkt", false), ("hyperkahler", false)];
    out.push(almost_abelian_8(1, 0, [0, 0, 0], &not_strong));
    out.push(almost_abelian_8(0, 1, [0, 0, 0], &not_hkt));
    out.push(almost_abelian_8(1, 1, [1, 0, 0], &not_hkt));
    out.push(almost_abelian_8(2, 1, [0, 1, 0], &not_hkt));
    out
}

/// All built-in entries, in a fixed order.
pub fn standard_entries() -> Vec<CatalogEntry<Exact>> {
    let mut out = vec![
        su3_samelson(),
        hopf_su2_r(),
        hopf_x_hopf(),
        abelian_r4(),
        abelian_r8(),
        dotti_fino_nilpotent(),
    ];
    out.extend(almost_abelian_family());
    out
}

/// Looks up a built-in entry by name.
pub fn find(name: &str) -> Result<CatalogEntry<Exact>, CatalogError> {
    standard_entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CatalogError::Unknown(name.to_string()))
}

// ---------------------------------------------------------------------------
// Products
// ---------------------------------------------------------------------------

fn block<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> Mat<S> {
    let (na, nb) = (a.rows(), b.rows());
    Mat::from_fn(na + nb, na + nb, |r, c| {
        if r < na && c < na {
            a.get(r, c).clone()
        } else if r >= na && c >= na {
            b.get(r - na, c - na).clone()
        } else {
            S::zero()
        }
    })
}

/// Direct-sum entry with block metric and block structures. Expected flags
/// that are conjunctive under products (`hkt`, `strong_hkt`, `hyperkahler`,
/// `balanced`, `parallel_torsion`, `kahler`, `skt`, `bismut_flat`) are
/// propagated when both factors declare them.
pub fn product<S: Scalar>(a: &CatalogEntry<S>, b: &CatalogEntry<S>) -> Result<CatalogEntry<S>, CatalogError> {
    let data = match (&a.data, &b.data) {
        (EntryData::Hyper(p), EntryData::Hyper(q)) => {
            let alg = p.algebra.direct_sum(&q.algebra);
            let g = Metric::new(block(p.g.matrix(), q.g.matrix())).map_err(|e| CatalogError::Metric(e.to_string()))?;
            EntryData::Hyper(HyperHermitianData::new(
                alg,
                g,
                block(&p.i, &q.i),
                block(&p.j, &q.j),
                block(&p.k, &q.k),
            )?)
        }
        (EntryData::Complex(p), EntryData::Complex(q)) => {
            let alg = p.algebra.direct_sum(&q.algebra);
            let g = Metric::new(block(p.g.matrix(), q.g.matrix())).map_err(|e| CatalogError::Metric(e.to_string()))?;
            EntryData::Complex(HermitianData::new(alg, g, block(&p.j, &q.j))?)
        }
        _ => return Err(CatalogError::MixedKinds),
    };
    let conj = [
        "hkt",
        "strong_hkt",
        "hyperkahler",
        "balanced",
        "parallel_torsion",
        "kahler",
        "skt",
        "bismut_flat",
    ];
    let mut exp = BTreeMap::new();
    for key in conj {
        if let (Some(x), Some(y)) = (a.expected.get(key), b.expected.get(key)) {
            exp.insert(key.to_string(), *x && *y);
        }
    }
    Ok(CatalogEntry {
        name: format!("{}_x_{}", a.name, b.name),
        data,
        expected: exp,
        provenance: format!("product of {} and {}", a.name, b.name),
    })
}

// ---------------------------------------------------------------------------
// JSON entry files
// ---------------------------------------------------------------------------

fn matrix_json(m: &Mat<Exact>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array((0..m.cols()).map(|c| Value::String(m.get(r, c).to_string())).collect()))
            .collect(),
    )
}

/// Serializes an entry (deterministic key order and bracket order).
pub fn to_json(entry: &CatalogEntry<Exact>) -> String {
    let alg = entry.data.algebra();
    let brackets: Vec<Value> = alg
        .sparse_brackets()
        .into_iter()
        .map(|(i, j, k, c)| json!([i + 1, j + 1, k + 1, c.to_string()]))
        .collect();
    let mut obj = Map::new();
    obj.insert("version".into(), json!(FORMAT_VERSION));
    obj.insert("name".into(), json!(entry.name));
    obj.insert("dim".into(), json!(entry.dim()));
    obj.insert("brackets".into(), Value::Array(brackets));
    obj.insert("metric".into(), matrix_json(entry.data.metric().matrix()));
    match &entry.data {
        EntryData::Hyper(q) => {
            obj.insert("I".into(), matrix_json(&q.i));
            obj.insert("J".into(), matrix_json(&q.j));
            obj.insert("K".into(), matrix_json(&q.k));
        }
        EntryData::Complex(h) => {
            obj.insert("I".into(), matrix_json(&h.j));
        }
    }
    if !entry.expected.is_empty() {
        let exp: Map<String, Value> = entry.expected.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        obj.insert("expected".into(), Value::Object(exp));
    }
    if !entry.provenance.is_empty() {
        obj.insert("provenance".into(), json!(entry.provenance));
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
    s.push('\n');
    s
}

fn parse_scalar(v: &Value, field: &str) -> Result<Exact, CatalogError> {
    match v {
        Value::String(s) => Exact::from_str(s).map_err(|e| field_err(field, e.to_string())),
        Value::Number(n) if n.is_i64() => Ok(Exact::int(n.as_i64().expect("checked"))),
        _ => Err(field_err(field, "expected a rational string such as \"-3/4\"")),
    }
}

fn parse_matrix(v: &Value, field: &str, n: usize) -> Result<Mat<Exact>, CatalogError> {
    let rows = v.as_array().ok_or_else(|| field_err(field, "expected an array of rows"))?;
    if rows.len() != n {
        return Err(field_err(field, format!("expected {n} rows, found {}", rows.len())));
    }
    let mut out = Vec::with_capacity(n);
    for (r, row) in rows.iter().enumerate() {
        let f = format!("{field}[{r}]");
        let cells = row.as_array().ok_or_else(|| field_err(&f, "expected an array"))?;
        if cells.len() != n {
            return Err(field_err(&f, format!("expected {n} entries, found {}", cells.len())));
        }
        let parsed = cells
            .iter()
            .enumerate()
            .map(|(c, x)| parse_scalar(x, &format!("{field}[{r}][{c}]")))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(parsed);
    }
    Ok(Mat::from_rows(out))
}

fn parse_index(v: &Value, field: &str, n: usize) -> Result<usize, CatalogError> {
    let i = v
        .as_u64()
        .ok_or_else(|| field_err(field, "expected a positive integer index"))? as usize;
    if i == 0 || i > n {
        return Err(field_err(field, format!("index {i} out of range 1..={n}")));
    }
    Ok(i - 1)
}

/// Parses and validates an entry document.
pub fn from_json(text: &str) -> Result<CatalogEntry<Exact>, CatalogError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CatalogError::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let obj = doc.as_object().ok_or_else(|| field_err("$", "expected a JSON object"))?;
    let version = obj
        .get("version")
        .and_then(Value::as_u64)
        .ok_or_else(|| field_err("version", "missing or not an integer"))?;
    if version != FORMAT_VERSION {
        return Err(field_err("version", format!("unsupported version {version} (expected {FORMAT_VERSION})")));
    }
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| field_err("name", "missing or not a string"))?
        .to_string();
    let n = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| field_err("dim", "missing or not a positive integer"))? as usize;
    if n == 0 {
        return Err(field_err("dim", "dimension must be positive"));
    }
    let brackets = obj
        .get("brackets")
        .and_then(Value::as_array)
        .ok_or_else(|| field_err("brackets", "missing or not an array"))?;
    let mut list = Vec::with_capacity(brackets.len());
    let mut seen = std::collections::HashSet::new();
    for (t, b) in brackets.iter().enumerate() {
        let f = format!("brackets[{t}]");
        let arr = b
            .as_array()
            .filter(|a| a.len() == 4)
            .ok_or_else(|| field_err(&f, "expected [i, j, k, \"coefficient\"]"))?;
        let i = parse_index(&arr[0], &format!("{f}[0]"), n)?;
        let j = parse_index(&arr[1], &format!("{f}[1]"), n)?;
        let k = parse_index(&arr[2], &format!("{f}[2]"), n)?;
        let c = parse_scalar(&arr[3], &format!("{f}[3]"))?;
        if i == j {
            return Err(field_err(&f, format!("[e{},e{}] must vanish", i + 1, j + 1)));
        }
        if !seen.insert((i.min(j), i.max(j), k)) {
            return Err(field_err(
                &f,
                format!("duplicate coefficient for [e{},e{}] on e{}", i + 1, j + 1, k + 1),
            ));
        }
        list.push((i, j, k, c));
    }
    let alg = LieAlgebra::from_brackets(n, &list)?;
    alg.validate()?;
    let gm = parse_matrix(obj.get("metric").ok_or_else(|| field_err("metric", "missing"))?, "metric", n)?;
    let g = Metric::new(gm).map_err(|e| CatalogError::Metric(e.to_string()))?;
    let i = parse_matrix(obj.get("I").ok_or_else(|| field_err("I", "missing"))?, "I", n)?;
    let data = match obj.get("J") {
        Some(jv) => {
            let j = parse_matrix(jv, "J", n)?;
            let k = match obj.get("K") {
                Some(kv) => parse_matrix(kv, "K", n)?,
                None => i.mul(&j),
            };
            EntryData::Hyper(HyperHermitianData::new(alg, g, i, j, k)?)
        }
        None => {
            if obj.contains_key("K") {
                return Err(field_err("K", "K given without J"));
            }
            EntryData::Complex(HermitianData::new(alg, g, i)?)
        }
    };
    let mut exp = BTreeMap::new();
    if let Some(e) = obj.get("expected") {
        let m = e.as_object().ok_or_else(|| field_err("expected", "expected an object of booleans"))?;
        for (k, v) in m {
            let f = format!("expected.{k}");
            if !KNOWN_FLAGS.contains(&k.as_str()) {
                return Err(field_err(&f, format!("unknown flag (known: {})", KNOWN_FLAGS.join(", "))));
            }
            exp.insert(k.clone(), v.as_bool().ok_or_else(|| field_err(&f, "expected a boolean"))?);
        }
    }
    let provenance = obj
        .get("provenance")
        .and_then(Value::as_str)
        .unwrap_or("")
        .to_string();
    for key in obj.keys() {
        if !["version", "name", "dim", "brackets", "metric", "I", "J", "K", "expected", "provenance"]
            .contains(&key.as_str())
        {
            return Err(field_err(key, "unknown field"));
        }
    }
    Ok(CatalogEntry {
        name,
        data,
        expected: exp,
        provenance,
    })
}

pub fn load_entry(path: &Path) -> Result<CatalogEntry<Exact>, CatalogError> {
    let text = fs::read_to_string(path).map_err(|e| CatalogError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    from_json(&text)
}

pub fn save_entry(entry: &CatalogEntry<Exact>, path: &Path) -> Result<(), CatalogError> {
    fs::write(path, to_json(entry)).map_err(|e| CatalogError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// Structural equality of two exact entries (algebra, metric, structures).
pub fn same_data(a: &EntryData<Exact>, b: &EntryData<Exact>) -> bool {
    let eq = |x: &Mat<Exact>, y: &Mat<Exact>| x.rows() == y.rows() && x.entries() == y.entries();
    let alg_eq = a.algebra().dim() == b.algebra().dim() && a.algebra().sparse_brackets() == b.algebra().sparse_brackets();
    alg_eq
        && eq(a.metric().matrix(), b.metric().matrix())
        && match (a, b) {
            (EntryData::Hyper(p), EntryData::Hyper(q)) => eq(&p.i, &q.i) && eq(&p.j, &q.j) && eq(&p.k, &q.k),
            (EntryData::Complex(p), EntryData::Complex(q)) => eq(&p.j, &q.j),
            _ => false,
        }
}

/// Converts a complex structure matrix into an entry with only `I`.
pub fn complex_entry(name: &str, alg: LieAlgebra<Exact>, g: Metric<Exact>, j: Endomorphism<Exact>) -> Result<CatalogEntry<Exact>, CatalogError> {
    Ok(CatalogEntry {
        name: name.to_string(),
        data: EntryData::Complex(HermitianData::new(alg, g, j)?),
        expected: BTreeMap::new(),
        provenance: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn built_ins_validate() {
        let all = standard_entries();
        assert!(all.len() >= 15);
        let mut names: Vec<&str> = all.iter().map(|e| e.name.as_str()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), all.len(), "entry names are unique");
        for e in &all {
            assert!(e.data.algebra().jacobi_check(), "{}", e.name);
        }
    }

    #[test]
    fn su3_has_27_structure_constants() {
        let e = su3_samelson();
        assert_eq!(e.data.algebra().sparse_brackets().len(), 27);
    }

    #[test]
    fn round_trip() {
        for e in standard_entries() {
            let text = to_json(&e);
            let back = from_json(&text).unwrap();
            assert_eq!(back.name, e.name);
            assert_eq!(back.expected, e.expected);
            assert!(same_data(&back.data, &e.data), "{}", e.name);
            assert_eq!(to_json(&back), text);
        }
    }

    #[test]
    fn product_of_hopf_factors_is_hopf_x_hopf() {
        let h = hopf_su2_r();
        let p = product(&h, &h).unwrap();
        assert!(same_data(&p.data, &hopf_x_hopf().data));
    }
}
