//! Exact multilinear algebra on a fixed finite-dimensional real vector
//! space with a chosen basis: alternating forms, metrics, endomorphisms,
//! wedge and interior products, pullbacks, the signed complex-structure
//! action on forms, norms and the Hodge star on an oriented subspace.
//!
//! Norms use the full unrestricted index sum
//! `‖a‖² = Σ_{i_1,…,i_k} a(e_{i_1},…,e_{i_k})²` over a g-orthonormal frame,
//! computed through metric-inverse contraction (no orthonormal frame is ever
//! built). With this convention `‖e^{12} + e^{34}‖² = 4` for the identity
//! metric in dimension 4.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::linalg::{vis_zero, vmax_abs, Mat, Vector};
use crate::par;
use crate::scalar::Scalar;

/// An endomorphism of the underlying space (column `j` = image of `e_j`).
pub type Endomorphism<S> = Mat<S>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultilinearError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("metric is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("endomorphism does not square to minus the identity")]
    NotComplexStructure,
    #[error("form is not supported on the given subspace")]
    NotSupported,
    #[error("the volume normalisation needs a square root outside the scalar field")]
    NeedsSquareRoot,
    #[error("subspace basis is degenerate")]
    DegenerateSubspace,
}

// ---------------------------------------------------------------------------
// Combinatorics of increasing index tuples
// ---------------------------------------------------------------------------

type ComboTable = Arc<Vec<Vec<usize>>>;

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// All strictly increasing `k`-tuples in `0..n`, in colexicographic order
/// (so that [`rank_of`] is their position). Cached per `(n, k)`.
pub fn combinations(n: usize, k: usize) -> ComboTable {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), ComboTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("combination cache poisoned").get(&(n, k)) {
        return t.clone();
    }
    let mut out = Vec::with_capacity(binom(n, k));
    if k <= n {
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(cur.clone());
            // colex successor: find the first position that can be bumped
            let mut i = 0;
            while i < k {
                let limit = if i + 1 < k { cur[i + 1] } else { n };
                if cur[i] + 1 < limit {
                    break;
                }
                i += 1;
            }
            if i == k {
                break;
            }
            cur[i] += 1;
            for (j, c) in cur.iter_mut().enumerate().take(i) {
                *c = j;
            }
        }
    }
    let table = Arc::new(out);
    cache
        .lock()
        .expect("combination cache poisoned")
        .insert((n, k), table.clone());
    table
}

/// Colex rank of a strictly increasing tuple.
pub fn rank_of(tuple: &[usize]) -> usize {
    tuple.iter().enumerate().map(|(j, &i)| binom(i, j + 1)).sum()
}

/// Sorts `idx` in place and returns the permutation sign, or `None` if an
/// index repeats.
pub fn sort_with_sign(idx: &mut [usize]) -> Option<i8> {
    let mut sign = 1i8;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && idx[j - 1] == idx[j] {
            return None;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

fn apply_sign<S: Scalar>(sign: i8, v: S) -> S {
    if sign < 0 {
        -v
    } else {
        v
    }
}

// ---------------------------------------------------------------------------
// Alternating forms
// ---------------------------------------------------------------------------

/// A degree-`k` alternating form on an `n`-dimensional space, stored on
/// strictly increasing index tuples.
#[derive(Clone)]
pub struct Form<S> {
    n: usize,
    k: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> Form<S> {
    pub fn zero(n: usize, k: usize) -> Self {
        Form {
            n,
            k,
            coeffs: vec![S::zero(); binom(n, k)],
        }
    }

    /// The constant 0-form `c`.
    pub fn constant(n: usize, c: S) -> Self {
        Form { n, k: 0, coeffs: vec![c] }
    }

    /// Builds a form from its values on increasing tuples (evaluated in
    /// parallel when the feature is enabled).
    pub fn from_fn<F>(n: usize, k: usize, f: F) -> Self
    where
        F: Fn(&[usize]) -> S + Sync + Send,
    {
        let table = combinations(n, k);
        let coeffs = par::map_range(table.len(), |r| f(&table[r]));
        Form { n, k, coeffs }
    }

    /// The basis form `e^{i_1} ∧ … ∧ e^{i_k}` (any order; repeated indices
    /// give zero).
    pub fn basis(n: usize, idx: &[usize]) -> Self {
        let mut f = Form::zero(n, idx.len());
        let mut sorted = idx.to_vec();
        if let Some(s) = sort_with_sign(&mut sorted) {
            f.coeffs[rank_of(&sorted)] = apply_sign(s, S::one());
        }
        f
    }

    /// The 1-form with the given coefficients.
    pub fn one_form(coeffs: &[S]) -> Self {
        Form {
            n: coeffs.len(),
            k: 1,
            coeffs: coeffs.to_vec(),
        }
    }

    /// The 2-form with `a(e_i, e_j) = m[i][j]` (upper triangle is read).
    pub fn from_matrix(m: &Mat<S>) -> Self {
        Form::from_fn(m.rows(), 2, |t| m.get(t[0], t[1]).clone())
    }

    /// `a(e_i, e_j)` as a skew matrix (2-forms only).
    pub fn to_matrix(&self) -> Mat<S> {
        assert_eq!(self.k, 2, "to_matrix needs a 2-form");
        Mat::from_fn(self.n, self.n, |i, j| self.eval_indices(&[i, j]))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    /// Coefficients on increasing tuples, in colex order.
    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Non-zero entries as `(increasing tuple, coefficient)` pairs.
    pub fn terms(&self) -> Vec<(Vec<usize>, S)> {
        let table = combinations(self.n, self.k);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(r, c)| (table[r].clone(), c.clone()))
            .collect()
    }

    /// Value on a basis tuple in any order.
    pub fn eval_indices(&self, idx: &[usize]) -> S {
        assert_eq!(idx.len(), self.k, "wrong number of arguments");
        let mut s = idx.to_vec();
        match sort_with_sign(&mut s) {
            Some(sign) => apply_sign(sign, self.coeffs[rank_of(&s)].clone()),
            None => S::zero(),
        }
    }

    /// Value on arbitrary vectors (multilinear expansion over non-zero
    /// components).
    pub fn eval_vectors(&self, vs: &[&[S]]) -> S {
        assert_eq!(vs.len(), self.k, "wrong number of arguments");
        if self.k == 0 {
            return self.coeffs[0].clone();
        }
        let mut acc = S::zero();
        let mut idx = Vec::with_capacity(self.k);
        self.expand(vs, &mut idx, S::one(), &mut acc);
        acc
    }

    fn expand(&self, vs: &[&[S]], idx: &mut Vec<usize>, coeff: S, acc: &mut S) {
        let slot = idx.len();
        if slot == self.k {
            let v = self.eval_indices(idx);
            if !v.is_zero() {
                *acc = acc.clone() + coeff * v;
            }
            return;
        }
        for (i, c) in vs[slot].iter().enumerate() {
            if c.is_zero() || idx.contains(&i) {
                continue;
            }
            idx.push(i);
            self.expand(vs, idx, coeff.clone() * c.clone(), acc);
            idx.pop();
        }
    }

    fn check_same(&self, o: &Form<S>) {
        assert_eq!(self.n, o.n, "dimension mismatch");
        assert_eq!(self.k, o.k, "degree mismatch");
    }

    pub fn add(&self, o: &Form<S>) -> Form<S> {
        self.check_same(o);
        Form {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, o: &Form<S>) -> Form<S> {
        self.check_same(o);
        Form {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Form<S> {
        Form {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().map(|a| c.clone() * a.clone()).collect(),
        }
    }

    pub fn neg(&self) -> Form<S> {
        self.scale(&-S::one())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Form<T> {
        Form {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn approx_eq(&self, o: &Form<S>) -> bool {
        self.n == o.n
            && self.k == o.k
            && self.coeffs.iter().zip(&o.coeffs).all(|(a, b)| a.approx_eq(b))
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        vmax_abs(&self.coeffs)
    }

    /// Largest absolute coefficient of `self − o`.
    pub fn max_diff(&self, o: &Form<S>) -> f64 {
        self.sub(o).max_abs()
    }

    /// Wedge product.
    pub fn wedge(&self, o: &Form<S>) -> Form<S> {
        assert_eq!(self.n, o.n, "dimension mismatch in wedge");
        let n = self.n;
        let k = self.k + o.k;
        if k > n {
            return Form::zero(n, k);
        }
        let mut out: Form<S> = Form::zero(n, k);
        let left = self.terms();
        let right = o.terms();
        for (ti, ci) in &left {
            for (tj, cj) in &right {
                if ti.iter().any(|i| tj.contains(i)) {
                    continue;
                }
                let mut idx: Vec<usize> = ti.iter().chain(tj.iter()).copied().collect();
                let sign = sort_with_sign(&mut idx).expect("disjoint tuples");
                let r = rank_of(&idx);
                out.coeffs[r] = out.coeffs[r].clone() + apply_sign(sign, ci.clone() * cj.clone());
            }
        }
        out
    }

    /// `k`-th wedge power (`a^0 = 1`).
    pub fn wedge_power(&self, p: usize) -> Form<S> {
        let mut acc = Form::constant(self.n, S::one());
        for _ in 0..p {
            acc = acc.wedge(self);
        }
        acc
    }

    /// Interior product `(ι_v a)(X_1, …) = a(v, X_1, …)`. A 0-form maps to
    /// the zero 0-form.
    pub fn interior(&self, v: &[S]) -> Form<S> {
        assert_eq!(v.len(), self.n, "dimension mismatch in interior product");
        if self.k == 0 {
            return Form::constant(self.n, S::zero());
        }
        Form::from_fn(self.n, self.k - 1, |t| {
            let mut acc = S::zero();
            let mut idx = Vec::with_capacity(self.k);
            for (i, c) in v.iter().enumerate() {
                if c.is_zero() || t.contains(&i) {
                    continue;
                }
                idx.clear();
                idx.push(i);
                idx.extend_from_slice(t);
                acc = acc + c.clone() * self.eval_indices(&idx);
            }
            acc
        })
    }

    /// Pullback `(M^*a)(X_1, …) = a(MX_1, …, MX_k)`.
    pub fn pullback(&self, m: &Mat<S>) -> Form<S> {
        assert_eq!(m.rows(), self.n);
        let cols: Vec<Vector<S>> = (0..m.cols()).map(|j| m.column(j)).collect();
        Form::from_fn(m.cols(), self.k, |t| {
            let vs: Vec<&[S]> = t.iter().map(|&i| cols[i].as_slice()).collect();
            self.eval_vectors(&vs)
        })
    }

    /// Derivation action `(A·a)(X_1,…,X_k) = Σ_j a(X_1,…,AX_j,…,X_k)`.
    pub fn derivation(&self, m: &Mat<S>) -> Form<S> {
        let cols: Vec<Vector<S>> = (0..self.n).map(|j| m.column(j)).collect();
        Form::from_fn(self.n, self.k, |t| {
            let mut acc = S::zero();
            for slot in 0..t.len() {
                let mut idx = t.to_vec();
                for (i, c) in cols[t[slot]].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    idx[slot] = i;
                    acc = acc + c.clone() * self.eval_indices(&idx);
                }
            }
            acc
        })
    }

    /// Signed action of an almost-complex structure on forms:
    /// `(Ja)(X_1,…,X_k) = a(−JX_1,…,−JX_k)`.
    pub fn j_act(&self, j: &Endomorphism<S>) -> Form<S> {
        let p = self.pullback(j);
        if self.k % 2 == 1 {
            p.neg()
        } else {
            p
        }
    }

    /// Full-sum inner product `Σ_{i…} a_{i…} b^{i…}` via metric-inverse
    /// contraction.
    pub fn inner(&self, g: &Metric<S>, o: &Form<S>) -> S {
        self.check_same(o);
        let k = self.k;
        let fact = S::from_i64((1..=k as i64).product::<i64>().max(1));
        let ginv = g.inverse();
        let left = self.terms();
        let right = o.terms();
        let mut acc = S::zero();
        let diag = g.is_identity();
        for (ti, ci) in &left {
            for (tj, cj) in &right {
                let minor = if diag {
                    if ti == tj {
                        S::one()
                    } else {
                        continue;
                    }
                } else {
                    Mat::from_fn(k, k, |p, q| ginv.get(ti[p], tj[q]).clone()).det()
                };
                if minor.is_zero() {
                    continue;
                }
                acc = acc + ci.clone() * cj.clone() * minor;
            }
        }
        fact * acc
    }

    /// Full-sum squared norm (see module docs).
    pub fn norm_sq(&self, g: &Metric<S>) -> S {
        self.inner(g, self)
    }
}

impl<S: Scalar> fmt::Debug for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<S: Scalar> fmt::Display for Form<S> {
    /// Human-readable expansion, e.g. `1·e^{1,2} + -1·e^{3,4}` (1-based).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (t, c) in &self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let idx: Vec<String> = t.iter().map(|i| (i + 1).to_string()).collect();
            if t.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}·e^{{{}}}", idx.join(","))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// A positive-definite symmetric bilinear form with cached inverse.
#[derive(Clone, Debug)]
pub struct Metric<S> {
    g: Mat<S>,
    ginv: Mat<S>,
    identity: bool,
}

impl<S: Scalar> Metric<S> {
    /// Validates symmetry and positive definiteness (leading minors).
    pub fn new(g: Mat<S>) -> Result<Self, MultilinearError> {
        if !g.is_positive_definite() {
            return Err(MultilinearError::NotPositiveDefinite);
        }
        let ginv = g.inverse().ok_or(MultilinearError::NotPositiveDefinite)?;
        let identity = g.approx_eq(&Mat::identity(g.rows()));
        Ok(Metric { g, ginv, identity })
    }

    pub fn identity(n: usize) -> Self {
        Metric {
            g: Mat::identity(n),
            ginv: Mat::identity(n),
            identity: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn matrix(&self) -> &Mat<S> {
        &self.g
    }

    pub fn inverse(&self) -> &Mat<S> {
        &self.ginv
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// `g(u, v)`.
    pub fn inner(&self, u: &[S], v: &[S]) -> S {
        crate::linalg::dot(u, &self.g.apply(v))
    }

    /// `g(e_i, e_j)`.
    pub fn at(&self, i: usize, j: usize) -> &S {
        self.g.get(i, j)
    }

    /// `v^♭ = g(v, ·)` as a coefficient vector.
    pub fn flat(&self, v: &[S]) -> Vector<S> {
        self.g.apply(v)
    }

    /// `α^♯`, the vector with `g(α^♯, ·) = α`.
    pub fn sharp(&self, alpha: &[S]) -> Vector<S> {
        self.ginv.apply(alpha)
    }

    /// `v^♭` as a 1-form.
    pub fn flat_form(&self, v: &[S]) -> Form<S> {
        Form::one_form(&self.flat(v))
    }

    /// `c·g`.
    pub fn scaled(&self, c: &S) -> Metric<S> {
        Metric {
            g: self.g.scale(c),
            ginv: self.ginv.scale(&(S::one() / c.clone())),
            identity: self.identity && c.is_one(),
        }
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> Metric<T> {
        Metric {
            g: self.g.convert(f),
            ginv: self.ginv.convert(f),
            identity: self.identity,
        }
    }

    /// Whether `J` is g-orthogonal: `g(JX, JY) = g(X, Y)`.
    pub fn is_compatible(&self, j: &Endomorphism<S>) -> bool {
        j.transpose().mul(&self.g).mul(j).approx_eq(&self.g)
    }

    /// Whether `A` is g-skew: `g(AX, Y) + g(X, AY) = 0`.
    pub fn is_skew(&self, a: &Endomorphism<S>) -> bool {
        a.transpose().mul(&self.g).add(&self.g.mul(a)).is_zero()
    }

    /// Lowers the last slot of a (1,2)-tensor given as vectors
    /// `T(x, y) ∈ V`: returns `g(T(x,y), e_z)`.
    pub fn lower(&self, v: &[S]) -> Vector<S> {
        self.flat(v)
    }
}

// ---------------------------------------------------------------------------
// Complex structures and invariance
// ---------------------------------------------------------------------------

/// Checks `J² = −Id`.
pub fn is_almost_complex<S: Scalar>(j: &Endomorphism<S>) -> bool {
    j.is_square() && j.mul(j).approx_eq(&Mat::identity(j.rows()).neg())
}

/// Signed action of `J` on a form, validating `J² = −Id`.
pub fn j_act<S: Scalar>(j: &Endomorphism<S>, a: &Form<S>) -> Result<Form<S>, MultilinearError> {
    if j.rows() != a.dim() {
        return Err(MultilinearError::DimensionMismatch(j.rows(), a.dim()));
    }
    if !is_almost_complex(j) {
        return Err(MultilinearError::NotComplexStructure);
    }
    Ok(a.j_act(j))
}

/// True iff `j_act(L, a) = a` for every supplied structure (for 2-forms:
/// type (1,1) with respect to each `L`).
pub fn invariance_check<S: Scalar>(a: &Form<S>, structures: &[&Endomorphism<S>]) -> bool {
    structures.iter().all(|l| a.j_act(l).approx_eq(a))
}

/// `v^♭` for the given metric.
pub fn musical_flat<S: Scalar>(g: &Metric<S>, v: &[S]) -> Vector<S> {
    g.flat(v)
}

/// `α^♯` for the given metric.
pub fn musical_sharp<S: Scalar>(g: &Metric<S>, alpha: &[S]) -> Vector<S> {
    g.sharp(alpha)
}

// ---------------------------------------------------------------------------
// Hodge star on an oriented subspace
// ---------------------------------------------------------------------------

/// The `g`-dual coframe `u^p` of a basis `u_p` of a subspace: 1-forms on the
/// ambient space with `u^p(u_q) = δ^p_q` that vanish on the g-orthogonal
/// complement.
pub fn dual_coframe<S: Scalar>(g: &Metric<S>, basis: &[Vector<S>]) -> Result<Vec<Form<S>>, MultilinearError> {
    let m = basis.len();
    let gram = Mat::from_fn(m, m, |p, q| g.inner(&basis[p], &basis[q]));
    let ginv = gram.inverse().ok_or(MultilinearError::DegenerateSubspace)?;
    let flats: Vec<Vector<S>> = basis.iter().map(|u| g.flat(u)).collect();
    Ok((0..m)
        .map(|p| {
            let mut c = vec![S::zero(); g.dim()];
            for q in 0..m {
                let w = ginv.get(p, q);
                if w.is_zero() {
                    continue;
                }
                for (ci, fi) in c.iter_mut().zip(&flats[q]) {
                    *ci = ci.clone() + w.clone() * fi.clone();
                }
            }
            Form::one_form(&c)
        })
        .collect())
}

fn coframe_wedge<S: Scalar>(co: &[Form<S>], idx: &[usize], n: usize) -> Form<S> {
    idx.iter()
        .fold(Form::constant(n, S::one()), |acc, &p| acc.wedge(&co[p]))
}

/// Hodge star of a form supported on the subspace spanned by the ordered
/// (orientation-defining) `basis`, with respect to the restriction of `g`.
/// Satisfies `a ∧ ⋆b = ⟨a,b⟩ vol` with the standard (increasing-index)
/// inner product, so `⋆e^{12} = e^{34}` in dimension 4.
pub fn hodge_star<S: Scalar>(
    g: &Metric<S>,
    basis: &[Vector<S>],
    a: &Form<S>,
) -> Result<Form<S>, MultilinearError> {
    let n = g.dim();
    if a.dim() != n {
        return Err(MultilinearError::DimensionMismatch(a.dim(), n));
    }
    let m = basis.len();
    let k = a.degree();
    if k > m {
        return Err(MultilinearError::NotSupported);
    }
    let co = dual_coframe(g, basis)?;
    let gram = Mat::from_fn(m, m, |p, q| g.inner(&basis[p], &basis[q]));
    let gram_inv = gram.inverse().ok_or(MultilinearError::DegenerateSubspace)?;
    let sqrt_det = gram.det().sqrt().ok_or(MultilinearError::NeedsSquareRoot)?;

    // subspace coordinates a_P = a(u_{p1}, …) and the support check
    let combos_k = combinations(m, k);
    let coords: Vec<S> = combos_k
        .iter()
        .map(|p| {
            let vs: Vec<&[S]> = p.iter().map(|&i| basis[i].as_slice()).collect();
            a.eval_vectors(&vs)
        })
        .collect();
    let mut rebuilt = Form::zero(n, k);
    for (p, c) in combos_k.iter().zip(&coords) {
        if !c.is_zero() {
            rebuilt = rebuilt.add(&coframe_wedge(&co, p, n).scale(c));
        }
    }
    if !rebuilt.approx_eq(a) {
        return Err(MultilinearError::NotSupported);
    }

    // raised coordinates a^P = Σ_R det(G^{-1}[P,R]) a_R
    let raised: Vec<S> = combos_k
        .iter()
        .map(|p| {
            combos_k.iter().zip(&coords).fold(S::zero(), |acc, (r, c)| {
                if c.is_zero() {
                    return acc;
                }
                let minor = Mat::from_fn(k, k, |i, j| gram_inv.get(p[i], r[j]).clone()).det();
                acc + minor * c.clone()
            })
        })
        .collect();

    let mut out = Form::zero(n, m - k);
    for q in combinations(m, m - k).iter() {
        let mut val = S::zero();
        for (p, ap) in combos_k.iter().zip(&raised) {
            if ap.is_zero() || p.iter().any(|i| q.contains(i)) {
                continue;
            }
            let mut idx: Vec<usize> = p.iter().chain(q.iter()).copied().collect();
            let s = sort_with_sign(&mut idx).expect("complementary tuples");
            val = val + apply_sign(s, ap.clone());
        }
        if !val.is_zero() {
            out = out.add(&coframe_wedge(&co, q, n).scale(&(sqrt_det.clone() * val)));
        }
    }
    Ok(out)
}

/// Checks `v ∈ span` helper used by callers that need supports.
pub fn is_zero_vector<S: Scalar>(v: &[S]) -> bool {
    vis_zero(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    type F = Form<Exact>;

    fn e(n: usize, idx: &[usize]) -> F {
        F::basis(n, &idx.iter().map(|i| i - 1).collect::<Vec<_>>())
    }

    fn std_j4() -> Mat<Exact> {
        // J e1 = e2, J e3 = e4
        let mut j = Mat::zeros(4, 4);
        j.set(1, 0, Exact::int(1));
        j.set(0, 1, Exact::int(-1));
        j.set(3, 2, Exact::int(1));
        j.set(2, 3, Exact::int(-1));
        j
    }

    #[test]
    fn combination_ranks_are_positions() {
        for n in 0..7 {
            for k in 0..=n {
                for (r, t) in combinations(n, k).iter().enumerate() {
                    assert_eq!(rank_of(t), r);
                }
            }
        }
    }

    #[test]
    fn wedge_examples() {
        let w = e(4, &[1]).wedge(&e(4, &[2]));
        assert_eq!(w.eval_indices(&[0, 1]), Exact::int(1));
        assert!(e(4, &[1, 2]).wedge(&e(4, &[3, 4])).approx_eq(&e(4, &[1, 2, 3, 4])));
        let a = e(4, &[1, 2]).sub(&e(4, &[3, 4]));
        assert!(a.wedge(&a).approx_eq(&e(4, &[1, 2, 3, 4]).scale(&Exact::int(-2))));
    }

    #[test]
    fn interior_examples() {
        let v = crate::linalg::basis::<Exact>(4, 0);
        assert!(e(4, &[1, 2]).interior(&v).approx_eq(&e(4, &[2])));
        let v3 = crate::linalg::basis::<Exact>(4, 2);
        assert!(e(4, &[1, 2]).interior(&v3).is_zero());
        assert!(e(4, &[1, 2, 3]).interior(&v).approx_eq(&e(4, &[2, 3])));
    }

    #[test]
    fn musical_examples() {
        let g = Metric::<Exact>::identity(3);
        let v = crate::linalg::basis::<Exact>(3, 0);
        assert_eq!(g.flat(&v), v);
        let g2 = Metric::new(Mat::from_fn(3, 3, |i, j| {
            if i != j {
                Exact::int(0)
            } else if i == 0 {
                Exact::int(2)
            } else {
                Exact::int(1)
            }
        }))
        .unwrap();
        assert_eq!(g2.flat(&v)[0], Exact::int(2));
        assert_eq!(g2.sharp(&g2.flat(&v)), v);
    }

    #[test]
    fn hodge_examples() {
        let g = Metric::<Exact>::identity(4);
        let b: Vec<Vec<Exact>> = (0..4).map(|i| crate::linalg::basis(4, i)).collect();
        assert!(hodge_star(&g, &b, &e(4, &[1, 2])).unwrap().approx_eq(&e(4, &[3, 4])));
        let asd = e(4, &[1, 2]).sub(&e(4, &[3, 4]));
        assert!(hodge_star(&g, &b, &asd).unwrap().approx_eq(&asd.neg()));
        let sd = e(4, &[1, 2]).add(&e(4, &[3, 4]));
        assert!(hodge_star(&g, &b, &sd).unwrap().approx_eq(&sd));
    }

    #[test]
    fn norm_examples() {
        let g = Metric::<Exact>::identity(4);
        assert_eq!(e(4, &[1, 2]).add(&e(4, &[3, 4])).norm_sq(&g), Exact::int(4));
        assert_eq!(F::zero(4, 2).norm_sq(&g), Exact::int(0));
        let (l1, l2, l3) = (Exact::int(2), Exact::int(-3), Exact::ratio(1, 2));
        let a = e(4, &[1, 2])
            .sub(&e(4, &[3, 4]))
            .scale(&l1)
            .add(&e(4, &[1, 3]).sub(&e(4, &[4, 2])).scale(&l2))
            .add(&e(4, &[1, 4]).sub(&e(4, &[2, 3])).scale(&l3));
        let expect = Exact::int(4) * (l1.clone() * l1 + l2.clone() * l2 + l3.clone() * l3);
        assert_eq!(a.norm_sq(&g), expect);
    }

    #[test]
    fn j_action_examples() {
        let j = std_j4();
        assert!(e(4, &[1, 2]).j_act(&j).approx_eq(&e(4, &[1, 2])));
        assert!(e(4, &[1, 3]).j_act(&j).approx_eq(&e(4, &[2, 4])));
        // (Jα)(X) = α(−JX): with J e1 = e2, J e2 = −e1 this maps e^1 to e^2,
        // and the opposite structure maps it to −e^2.
        assert!(e(4, &[1]).j_act(&j).approx_eq(&e(4, &[2])));
        assert!(e(4, &[1]).j_act(&j.neg()).approx_eq(&e(4, &[2]).neg()));
        assert!(j_act(&Mat::<Exact>::identity(4), &e(4, &[1])).is_err());
    }

    #[test]
    fn invariance_examples() {
        let (i, j, k) = crate::quaternionic::standard_triple::<Exact>();
        let sd = e(4, &[1, 2]).add(&e(4, &[3, 4]));
        let asd = e(4, &[1, 2]).sub(&e(4, &[3, 4]));
        assert!(!invariance_check(&sd, &[&i, &j, &k]));
        assert!(invariance_check(&asd, &[&i, &j, &k]));
        assert!(invariance_check(&F::zero(4, 2), &[&i, &j, &k]));
    }
}
