//! Left-invariant connections and their curvature: torsion, curvature
//! tensors, Ricci-type traces, Bianchi identities, `H²`, the
//! Levi-Civita/Bismut curvature relation and holonomy algebras.
//!
//! Conventions: `T(X,Y) = ∇_X Y − ∇_Y X − [X,Y]`,
//! `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]}`, lowered as
//! `R(X,Y,Z,W) = g(R(X,Y)Z, W)`. All traces use metric-inverse contraction.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{dot, vadd, vis_zero, vmax_abs, vscale, vsub, vzero, Mat, Span, Vector};
use crate::liealg::LieAlgebra;
use crate::multilinear::{Endomorphism, Form, Metric};
use crate::par;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurvatureError {
    #[error("holonomy closure did not stabilise within {0} iterations")]
    ClosureDiverged(usize),
}

// ---------------------------------------------------------------------------
// Dense tensors
// ---------------------------------------------------------------------------

/// A dense covariant tensor of order `r` on an `n`-dimensional space,
/// indexed `t[i_1, …, i_r]` in row-major order.
#[derive(Clone, Debug)]
pub struct Tensor<S: Scalar> {
    n: usize,
    order: usize,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    pub fn zeros(n: usize, order: usize) -> Self {
        Tensor {
            n,
            order,
            data: vec![S::zero(); n.pow(order as u32)],
        }
    }

    /// Fills the tensor from `f(index tuple)`, in parallel when enabled.
    pub fn from_fn<F>(n: usize, order: usize, f: F) -> Self
    where
        F: Fn(&[usize]) -> S + Sync + Send,
    {
        let total = n.pow(order as u32);
        let data = par::map_range(total, |flat| {
            let idx = Self::unflatten(n, order, flat);
            f(&idx)
        });
        Tensor { n, order, data }
    }

    fn unflatten(n: usize, order: usize, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; order];
        for slot in (0..order).rev() {
            idx[slot] = flat % n;
            flat /= n;
        }
        idx
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.data[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        let f = self.flat(idx);
        self.data[f] = v;
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        vis_zero(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        vmax_abs(&self.data)
    }

    pub fn sub(&self, o: &Tensor<S>) -> Tensor<S> {
        assert_eq!((self.n, self.order), (o.n, o.order));
        Tensor {
            n: self.n,
            order: self.order,
            data: vsub(&self.data, &o.data),
        }
    }

    pub fn add(&self, o: &Tensor<S>) -> Tensor<S> {
        assert_eq!((self.n, self.order), (o.n, o.order));
        Tensor {
            n: self.n,
            order: self.order,
            data: vadd(&self.data, &o.data),
        }
    }

    pub fn scale(&self, c: &S) -> Tensor<S> {
        Tensor {
            n: self.n,
            order: self.order,
            data: vscale(c, &self.data),
        }
    }

    /// Largest absolute entry of `self − o`.
    pub fn max_diff(&self, o: &Tensor<S>) -> f64 {
        self.sub(o).max_abs()
    }

    /// Dense copy of an alternating form.
    pub fn from_form(a: &Form<S>) -> Tensor<S> {
        Tensor::from_fn(a.dim(), a.degree(), |idx| a.eval_indices(idx))
    }

    /// Value on arbitrary vectors.
    pub fn eval_vectors(&self, vs: &[&[S]]) -> S {
        assert_eq!(vs.len(), self.order);
        let mut acc = S::zero();
        let mut idx = Vec::with_capacity(self.order);
        self.expand(vs, &mut idx, S::one(), &mut acc);
        acc
    }

    fn expand(&self, vs: &[&[S]], idx: &mut Vec<usize>, coeff: S, acc: &mut S) {
        if idx.len() == self.order {
            let v = self.get(idx);
            if !v.is_zero() {
                *acc = acc.clone() + coeff * v.clone();
            }
            return;
        }
        for (i, c) in vs[idx.len()].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            idx.push(i);
            self.expand(vs, idx, coeff.clone() * c.clone(), acc);
            idx.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// Connections
// ---------------------------------------------------------------------------

/// Coefficients of a left-invariant connection: `gamma[x]` is the matrix of
/// `Y ↦ ∇_{e_x} Y`.
#[derive(Clone, Debug)]
pub struct Connection<S: Scalar> {
    gamma: Vec<Mat<S>>,
}

impl<S: Scalar> Connection<S> {
    pub fn new(gamma: Vec<Mat<S>>) -> Self {
        let n = gamma.len();
        assert!(gamma.iter().all(|m| m.rows() == n && m.cols() == n), "shape mismatch");
        Connection { gamma }
    }

    /// The connection with all coefficients zero (left-invariant fields
    /// parallel).
    pub fn flat_left(n: usize) -> Self {
        Connection {
            gamma: vec![Mat::zeros(n, n); n],
        }
    }

    /// Builds a connection from its lowered coefficients
    /// `L(x, y, z) = g(∇_{e_x} e_y, e_z)`.
    pub fn from_lowered(g: &Metric<S>, lowered: &Tensor<S>) -> Self {
        let n = g.dim();
        let ginv = g.inverse();
        let gamma = par::map_range(n, |x| {
            Mat::from_fn(n, n, |w, y| {
                (0..n).fold(S::zero(), |acc, z| {
                    let l = lowered.get(&[x, y, z]);
                    if l.is_zero() {
                        acc
                    } else {
                        acc + l.clone() * ginv.get(z, w).clone()
                    }
                })
            })
        });
        Connection { gamma }
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// `Λ(e_x) = ∇_{e_x}` as a matrix.
    pub fn gamma(&self, x: usize) -> &Mat<S> {
        &self.gamma[x]
    }

    /// `Λ(v) = Σ v_x Λ(e_x)`.
    pub fn gamma_of(&self, v: &[S]) -> Mat<S> {
        let n = self.dim();
        v.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Mat::zeros(n, n), |acc, (x, c)| acc.add(&self.gamma[x].scale(c)))
    }

    /// `∇_x y` for invariant vector fields.
    pub fn apply(&self, x: &[S], y: &[S]) -> Vector<S> {
        self.gamma_of(x).apply(y)
    }

    /// `g(∇_{e_x} e_y, e_z)`.
    pub fn lowered(&self, g: &Metric<S>) -> Tensor<S> {
        let n = self.dim();
        Tensor::from_fn(n, 3, |t| {
            let col = self.gamma[t[0]].column(t[1]);
            g.inner(&col, &crate::linalg::basis(n, t[2]))
        })
    }

    pub fn add_lowered(&self, g: &Metric<S>, extra: &Tensor<S>) -> Connection<S> {
        Connection::from_lowered(g, &self.lowered(g).add(extra))
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> Connection<T> {
        Connection {
            gamma: self.gamma.iter().map(|m| m.convert(f)).collect(),
        }
    }

    /// Largest coefficient difference.
    pub fn max_diff(&self, o: &Connection<S>) -> f64 {
        self.gamma
            .iter()
            .zip(&o.gamma)
            .map(|(a, b)| a.sub(b).max_abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, o: &Connection<S>) -> bool {
        self.gamma.iter().zip(&o.gamma).all(|(a, b)| a.approx_eq(b))
    }

    /// Torsion `T(e_x, e_y)` as an `n×n` array of vectors.
    pub fn torsion(&self, alg: &LieAlgebra<S>) -> TorsionTensor<S> {
        let n = self.dim();
        let vals = par::map_range(n * n, |t| {
            let (x, y) = (t / n, t % n);
            let a = self.gamma[x].column(y);
            let b = self.gamma[y].column(x);
            vsub(&vsub(&a, &b), alg.bracket_basis(x, y))
        });
        TorsionTensor { n, vals }
    }

    /// Largest entry of `∇g`: `g(Λ_x Y, Z) + g(Y, Λ_x Z)`.
    pub fn metric_defect(&self, g: &Metric<S>) -> f64 {
        self.gamma
            .iter()
            .map(|m| m.transpose().mul(g.matrix()).add(&g.matrix().mul(m)).max_abs())
            .fold(0.0, f64::max)
    }

    pub fn is_metric(&self, g: &Metric<S>) -> bool {
        self.gamma.iter().all(|m| g.is_skew(m))
    }

    /// Largest entry of `∇A = [Λ_x, A]` for an invariant endomorphism.
    pub fn endo_defect(&self, a: &Endomorphism<S>) -> f64 {
        self.gamma
            .iter()
            .map(|m| m.commutator(a).max_abs())
            .fold(0.0, f64::max)
    }

    pub fn preserves(&self, a: &Endomorphism<S>) -> bool {
        self.gamma.iter().all(|m| m.commutator(a).is_zero())
    }

    /// `∇_{e_x} v` for every basis direction; zero iff `v` is parallel.
    pub fn derivative_of_vector(&self, v: &[S]) -> Vec<Vector<S>> {
        self.gamma.iter().map(|m| m.apply(v)).collect()
    }

    pub fn is_parallel_vector(&self, v: &[S]) -> bool {
        self.gamma.iter().all(|m| vis_zero(&m.apply(v)))
    }

    /// `∇_{e_x} a` for an invariant form: `−Σ_j a(…, Λ_x Y_j, …)`.
    pub fn derivative_of_form(&self, x: usize, a: &Form<S>) -> Form<S> {
        a.derivation(&self.gamma[x]).neg()
    }

    /// The full covariant derivative `(∇a)(X; Y_1, …, Y_k)` as a dense
    /// tensor of order `k + 1`.
    pub fn covariant_derivative(&self, a: &Form<S>) -> Tensor<S> {
        let n = self.dim();
        let k = a.degree();
        let parts: Vec<Form<S>> = par::map_range(n, |x| self.derivative_of_form(x, a));
        Tensor::from_fn(n, k + 1, |idx| parts[idx[0]].eval_indices(&idx[1..]))
    }

    /// Whether `∇a = 0` componentwise.
    pub fn is_parallel_form(&self, a: &Form<S>) -> bool {
        (0..self.dim()).all(|x| self.derivative_of_form(x, a).is_zero())
    }
}

/// Torsion `T(e_x, e_y)` stored as vectors.
#[derive(Clone, Debug)]
pub struct TorsionTensor<S: Scalar> {
    n: usize,
    vals: Vec<Vector<S>>,
}

impl<S: Scalar> TorsionTensor<S> {
    pub fn at(&self, x: usize, y: usize) -> &Vector<S> {
        &self.vals[x * self.n + y]
    }

    /// `T(u, v)` for arbitrary vectors.
    pub fn apply(&self, u: &[S], v: &[S]) -> Vector<S> {
        let mut out = vzero(self.n);
        for (x, ux) in u.iter().enumerate() {
            if ux.is_zero() {
                continue;
            }
            for (y, vy) in v.iter().enumerate() {
                if vy.is_zero() {
                    continue;
                }
                let c = ux.clone() * vy.clone();
                out = vadd(&out, &vscale(&c, self.at(x, y)));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.vals.iter().all(|v| vis_zero(v))
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| vmax_abs(v)).fold(0.0, f64::max)
    }

    /// Lowered torsion `g(T(e_x, e_y), e_z)`.
    pub fn lowered(&self, g: &Metric<S>) -> Tensor<S> {
        let n = self.n;
        Tensor::from_fn(n, 3, |t| g.flat(self.at(t[0], t[1]))[t[2]].clone())
    }

    /// Whether the lowered torsion is totally antisymmetric.
    pub fn is_totally_skew(&self, g: &Metric<S>) -> bool {
        let l = self.lowered(g);
        let n = self.n;
        (0..n).all(|x| {
            (0..n).all(|y| {
                (0..n).all(|z| (l.get(&[x, y, z]).clone() + l.get(&[x, z, y]).clone()).is_zero())
            })
        })
    }
}

// ---------------------------------------------------------------------------
// Curvature
// ---------------------------------------------------------------------------

/// Curvature of an invariant connection: the operators `R(e_x, e_y)` and the
/// lowered tensor `R(X,Y,Z,W) = g(R(X,Y)Z, W)`.
#[derive(Clone, Debug)]
pub struct CurvatureTensor<S: Scalar> {
    n: usize,
    ops: Vec<Mat<S>>,
    lowered: Tensor<S>,
}

impl<S: Scalar> CurvatureTensor<S> {
    /// `R(e_x, e_y)` as an endomorphism.
    pub fn op(&self, x: usize, y: usize) -> &Mat<S> {
        &self.ops[x * self.n + y]
    }

    /// `R(u, v)` for arbitrary vectors.
    pub fn op_of(&self, u: &[S], v: &[S]) -> Mat<S> {
        let n = self.n;
        let mut out = Mat::zeros(n, n);
        for (x, ux) in u.iter().enumerate() {
            if ux.is_zero() {
                continue;
            }
            for (y, vy) in v.iter().enumerate() {
                if vy.is_zero() {
                    continue;
                }
                out = out.add(&self.op(x, y).scale(&(ux.clone() * vy.clone())));
            }
        }
        out
    }

    /// `R(e_x, e_y, e_z, e_w)`.
    pub fn get(&self, x: usize, y: usize, z: usize, w: usize) -> &S {
        self.lowered.get(&[x, y, z, w])
    }

    pub fn lowered(&self) -> &Tensor<S> {
        &self.lowered
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.ops.iter().all(|m| m.is_zero())
    }

    pub fn max_abs(&self) -> f64 {
        self.ops.iter().map(|m| m.max_abs()).fold(0.0, f64::max)
    }

    /// `R(X,Y,·,·) = −R(Y,X,·,·)`.
    pub fn is_antisymmetric_first_pair(&self) -> bool {
        let n = self.n;
        (0..n).all(|x| (0..n).all(|y| self.op(x, y).add(self.op(y, x)).is_zero()))
    }

    /// `R(·,·,Z,W) = −R(·,·,W,Z)` (metric connections).
    pub fn is_antisymmetric_last_pair(&self) -> bool {
        let n = self.n;
        (0..n).all(|x| {
            (0..n).all(|y| {
                (0..n).all(|z| {
                    (0..n).all(|w| (self.get(x, y, z, w).clone() + self.get(x, y, w, z).clone()).is_zero())
                })
            })
        })
    }
}

/// Curvature of an invariant connection on a Lie algebra.
pub fn curvature<S: Scalar>(conn: &Connection<S>, alg: &LieAlgebra<S>, g: &Metric<S>) -> CurvatureTensor<S> {
    let n = conn.dim();
    let ops = par::map_range(n * n, |t| {
        let (x, y) = (t / n, t % n);
        if x == y {
            return Mat::zeros(n, n);
        }
        let br = alg.bracket_basis(x, y);
        conn.gamma(x)
            .commutator(conn.gamma(y))
            .sub(&conn.gamma_of(br))
    });
    let gm = g.matrix();
    let lowered_rows: Vec<Mat<S>> = par::map_range(n * n, |t| ops[t].transpose().mul(gm));
    let lowered = Tensor::from_fn(n, 4, |i| lowered_rows[i[0] * n + i[1]].get(i[2], i[3]).clone());
    CurvatureTensor { n, ops, lowered }
}

/// Torsion of an invariant connection (free-function form).
pub fn torsion<S: Scalar>(conn: &Connection<S>, alg: &LieAlgebra<S>) -> TorsionTensor<S> {
    conn.torsion(alg)
}

/// Ricci-type traces of a curvature tensor.
#[derive(Clone, Debug)]
pub struct RicciTraces<S: Scalar> {
    /// `Ric(X,Y) = Σ_i R(e_i, X, Y, e_i)`.
    pub ric: Mat<S>,
    /// `scal = Σ_i Ric(e_i, e_i)`.
    pub scal: S,
    /// `ρ(X,Y) = ½ Σ_i R(X, Y, Je_i, e_i)` when a complex structure is given.
    pub rho: Option<Form<S>>,
}

/// `Ric`, `scal` and (optionally) the Ricci form, all via g-inverse
/// contraction.
pub fn ricci_traces<S: Scalar>(r: &CurvatureTensor<S>, g: &Metric<S>, j: Option<&Endomorphism<S>>) -> RicciTraces<S> {
    let n = r.dim();
    let ginv = g.inverse();
    let ric = Mat::from_fn(n, n, |x, y| {
        let mut acc = S::zero();
        for a in 0..n {
            for b in 0..n {
                let w = ginv.get(a, b);
                if w.is_zero() {
                    continue;
                }
                acc = acc + w.clone() * r.get(a, x, y, b).clone();
            }
        }
        acc
    });
    let scal = {
        let mut acc = S::zero();
        for a in 0..n {
            for b in 0..n {
                acc = acc + ginv.get(a, b).clone() * ric.get(a, b).clone();
            }
        }
        acc
    };
    let rho = j.map(|j| {
        // Σ_i R(X,Y,Je_i,e_i) = Σ_{a,b} g^{ab} R(X,Y,Je_a,e_b)
        let half = S::half();
        Form::from_fn(n, 2, |t| {
            let m = r.op(t[0], t[1]).transpose().mul(g.matrix()); // m[z][w] = R(x,y,z,w)
            let mut acc = S::zero();
            for a in 0..n {
                for b in 0..n {
                    let w = ginv.get(a, b);
                    if w.is_zero() {
                        continue;
                    }
                    // R(x,y,J e_a, e_b) = Σ_c J[c][a] m[c][b]
                    for c in 0..n {
                        let jc = j.get(c, a);
                        if jc.is_zero() {
                            continue;
                        }
                        acc = acc + w.clone() * jc.clone() * m.get(c, b).clone();
                    }
                }
            }
            half.clone() * acc
        })
    });
    RicciTraces { ric, scal, rho }
}

/// `H²(X,Y) = g(ι_X H, ι_Y H) = Σ_{j,k} H(X,e_j,e_k) H(Y,e_j,e_k)` with the
/// full-sum 2-form inner product.
pub fn h_squared<S: Scalar>(h: &Form<S>, g: &Metric<S>) -> Mat<S> {
    let n = g.dim();
    let slices: Vec<Form<S>> = (0..n).map(|x| h.interior(&crate::linalg::basis(n, x))).collect();
    Mat::from_fn(n, n, |x, y| slices[x].inner(g, &slices[y]))
}

/// `g(H(X,Y), H(Z,U)) = Σ g^{ab} H(X,Y,e_a) H(Z,U,e_b)`.
fn h_pair<S: Scalar>(h: &Tensor<S>, ginv: &Mat<S>, x: usize, y: usize, z: usize, u: usize) -> S {
    let n = h.dim();
    let mut acc = S::zero();
    for a in 0..n {
        let ha = h.get(&[x, y, a]);
        if ha.is_zero() {
            continue;
        }
        for b in 0..n {
            let w = ginv.get(a, b);
            if w.is_zero() {
                continue;
            }
            acc = acc + ha.clone() * w.clone() * h.get(&[z, u, b]).clone();
        }
    }
    acc
}

/// Outcome of the Bianchi identities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BianchiResult {
    pub first_ok: bool,
    pub second_ok: bool,
    pub first_residual: f64,
    pub second_residual: f64,
}

/// First Bianchi identity with torsion,
/// `𝔖 R(X,Y)Z = 𝔖 [T(T(X,Y),Z) + (∇_X T)(Y,Z)]`, and the second,
/// `𝔖 [(∇_X R)(Y,Z) + R(T(X,Y),Z)] = 0` (which reduces to
/// `𝔖 (∇_X R)(Y,Z) = 0` for torsion-free connections), on basis triples.
pub fn bianchi_check<S: Scalar>(conn: &Connection<S>, alg: &LieAlgebra<S>, g: &Metric<S>) -> BianchiResult {
    let n = conn.dim();
    let r = curvature(conn, alg, g);
    let t = conn.torsion(alg);
    let e = |i: usize| crate::linalg::basis::<S>(n, i);
    let nabla_t = |x: usize, y: &[S], z: &[S]| -> Vector<S> {
        let gx = conn.gamma(x);
        let a = gx.apply(&t.apply(y, z));
        let b = t.apply(&gx.apply(y), z);
        let c = t.apply(y, &gx.apply(z));
        vsub(&vsub(&a, &b), &c)
    };
    let nabla_r = |x: usize, y: &[S], z: &[S]| -> Mat<S> {
        let gx = conn.gamma(x);
        gx.commutator(&r.op_of(y, z))
            .sub(&r.op_of(&gx.apply(y), z))
            .sub(&r.op_of(y, &gx.apply(z)))
    };
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))
        .filter(|(x, y, z)| x < y && y < z)
        .collect();
    let res = par::map_slice(&triples, |&(x, y, z)| {
        let cyc = [(x, y, z), (y, z, x), (z, x, y)];
        let mut first = vzero::<S>(n);
        let mut second = Mat::zeros(n, n);
        for &(a, b, c) in &cyc {
            let rz = r.op(a, b).apply(&e(c));
            let tt = t.apply(t.at(a, b), &e(c));
            let nt = nabla_t(a, &e(b), &e(c));
            first = vadd(&first, &vsub(&rz, &vadd(&tt, &nt)));
            let nr = nabla_r(a, &e(b), &e(c));
            let rt = r.op_of(t.at(a, b), &e(c));
            second = second.add(&nr.add(&rt));
        }
        (vmax_abs(&first), second.max_abs(), vis_zero(&first), second.is_zero())
    });
    BianchiResult {
        first_ok: res.iter().all(|r| r.2),
        second_ok: res.iter().all(|r| r.3),
        first_residual: res.iter().map(|r| r.0).fold(0.0, f64::max),
        second_residual: res.iter().map(|r| r.1).fold(0.0, f64::max),
    }
}

/// Residual tensor of the Levi-Civita/Bismut curvature relation
/// `R^{LC}(X,Y,Z,U) = R^B(X,Y,Z,U) − ½(∇^B_X H)(Y,Z,U) + ½(∇^B_Y H)(X,Z,U)
///  − ½ g(H(X,Y),H(Z,U)) − ¼ g(H(Y,Z),H(X,U)) + ¼ g(H(X,Z),H(Y,U))`.
pub fn lc_from_bismut_residual<S: Scalar>(
    r_lc: &CurvatureTensor<S>,
    r_b: &CurvatureTensor<S>,
    bismut: &Connection<S>,
    h: &Form<S>,
    g: &Metric<S>,
) -> Tensor<S> {
    let n = g.dim();
    let nh = bismut.covariant_derivative(h);
    let ht = Tensor::from_form(h);
    let ginv = g.inverse().clone();
    let half = S::half();
    let quarter = S::from_ratio(1, 4);
    Tensor::from_fn(n, 4, |i| {
        let (x, y, z, u) = (i[0], i[1], i[2], i[3]);
        let rhs = r_b.get(x, y, z, u).clone() - half.clone() * nh.get(&[x, y, z, u]).clone()
            + half.clone() * nh.get(&[y, x, z, u]).clone()
            - half.clone() * h_pair(&ht, &ginv, x, y, z, u)
            - quarter.clone() * h_pair(&ht, &ginv, y, z, x, u)
            + quarter.clone() * h_pair(&ht, &ginv, x, z, y, u);
        r_lc.get(x, y, z, u).clone() - rhs
    })
}

// ---------------------------------------------------------------------------
// Holonomy
// ---------------------------------------------------------------------------

/// Smallest group in the chain `{0} ⊆ sp ⊆ su ⊆ u ⊆ so` containing the
/// holonomy algebra (or `gl` if it is not even metric).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HolonomyClass {
    Trivial,
    Sp,
    Su,
    U,
    So,
    Gl,
}

impl HolonomyClass {
    pub fn label(&self) -> &'static str {
        match self {
            HolonomyClass::Trivial => "{0}",
            HolonomyClass::Sp => "sp",
            HolonomyClass::Su => "su",
            HolonomyClass::U => "u",
            HolonomyClass::So => "so",
            HolonomyClass::Gl => "gl",
        }
    }
}

/// Holonomy algebra of an invariant connection.
#[derive(Clone, Debug)]
pub struct HolonomyAlgebra<S: Scalar> {
    pub basis: Vec<Mat<S>>,
    pub iterations: usize,
}

/// Containment data of a holonomy algebra.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolonomyReport {
    pub dim: usize,
    pub class: HolonomyClass,
    pub skew: bool,
    pub commutes_with_i: bool,
    pub traceless_with_i: bool,
    pub commutes_with_ijk: bool,
    /// How many of the supplied distinguished vectors are annihilated.
    pub annihilated: usize,
    pub closed_under_bracket: bool,
}

fn flatten<S: Scalar>(m: &Mat<S>) -> Vector<S> {
    m.entries().to_vec()
}

/// Nomizu closure: the smallest matrix space containing every `R(e_x,e_y)`
/// and closed under `A ↦ [Λ(e_x), A]`.
pub fn holonomy_algebra<S: Scalar>(
    conn: &Connection<S>,
    alg: &LieAlgebra<S>,
    g: &Metric<S>,
) -> Result<HolonomyAlgebra<S>, CurvatureError> {
    let n = conn.dim();
    let r = curvature(conn, alg, g);
    let mut span = Span::new(n * n);
    let mut basis: Vec<Mat<S>> = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            let m = r.op(x, y);
            if span.insert(&flatten(m)) {
                basis.push(m.clone());
            }
        }
    }
    let bound = n * n;
    let mut iterations = 0;
    let mut frontier = basis.clone();
    while !frontier.is_empty() {
        iterations += 1;
        if iterations > bound + 1 {
            return Err(CurvatureError::ClosureDiverged(bound));
        }
        let candidates: Vec<Mat<S>> = par::map_range(frontier.len() * n, |t| {
            conn.gamma(t % n).commutator(&frontier[t / n])
        });
        let mut next = Vec::new();
        for c in candidates {
            if span.insert(&flatten(&c)) {
                basis.push(c.clone());
                next.push(c);
            }
        }
        frontier = next;
    }
    Ok(HolonomyAlgebra { basis, iterations })
}

impl<S: Scalar> HolonomyAlgebra<S> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Containment checks against the metric and an optional hypercomplex
    /// triple (`structures[0]` plays the role of `I`), plus annihilation of
    /// the distinguished vectors.
    pub fn classify(&self, g: &Metric<S>, structures: &[&Endomorphism<S>], vectors: &[Vector<S>]) -> HolonomyReport {
        let skew = self.basis.iter().all(|a| g.is_skew(a));
        let commutes_with_i = structures
            .first()
            .is_some_and(|i| self.basis.iter().all(|a| a.commutator(i).is_zero()));
        let traceless_with_i = structures
            .first()
            .is_some_and(|i| self.basis.iter().all(|a| a.mul(i).trace().is_zero()));
        let commutes_with_ijk = structures.len() == 3
            && structures
                .iter()
                .all(|l| self.basis.iter().all(|a| a.commutator(l).is_zero()));
        let annihilated = vectors
            .iter()
            .filter(|v| self.basis.iter().all(|a| vis_zero(&a.apply(v))))
            .count();
        let class = if self.basis.is_empty() {
            HolonomyClass::Trivial
        } else if !skew {
            HolonomyClass::Gl
        } else if commutes_with_ijk {
            HolonomyClass::Sp
        } else if commutes_with_i && traceless_with_i {
            HolonomyClass::Su
        } else if commutes_with_i {
            HolonomyClass::U
        } else {
            HolonomyClass::So
        };
        HolonomyReport {
            dim: self.dim(),
            class,
            skew,
            commutes_with_i,
            traceless_with_i,
            commutes_with_ijk,
            annihilated,
            closed_under_bracket: self.is_closed_under_bracket(),
        }
    }

    /// Whether `[A, B]` stays in the span for all basis pairs.
    pub fn is_closed_under_bracket(&self) -> bool {
        let n2 = self.basis.first().map_or(0, |m| m.rows() * m.cols());
        let mut span = Span::new(n2);
        for b in &self.basis {
            span.insert(&flatten(b));
        }
        self.basis
            .iter()
            .enumerate()
            .all(|(i, a)| self.basis[i + 1..].iter().all(|b| span.contains(&flatten(&a.commutator(b)))))
    }
}

/// Symmetric bilinear form `(X,Y) ↦ Σ g^{ab} A(e_a, X, …)` helper:
/// the codifferential of an invariant form,
/// `δα = −Σ_i ι_{e_i} ∇_{e_i} α` over a g-orthonormal frame.
pub fn codifferential<S: Scalar>(conn: &Connection<S>, g: &Metric<S>, a: &Form<S>) -> Form<S> {
    let n = g.dim();
    if a.degree() == 0 {
        return Form::constant(n, S::zero());
    }
    let ginv = g.inverse();
    let mut acc = Form::zero(n, a.degree() - 1);
    for b in 0..n {
        let nab = conn.derivative_of_form(b, a);
        for c in 0..n {
            let w = ginv.get(c, b);
            if w.is_zero() {
                continue;
            }
            acc = acc.add(&nab.interior(&crate::linalg::basis(n, c)).scale(w));
        }
    }
    acc.neg()
}

/// `Σ_i (∇_{e_i} θ)(e_i)` for a 1-form, via g-inverse contraction.
pub fn divergence_of_one_form<S: Scalar>(conn: &Connection<S>, g: &Metric<S>, theta: &Form<S>) -> S {
    let n = g.dim();
    let ginv = g.inverse();
    let mut acc = S::zero();
    for a in 0..n {
        let nab = conn.derivative_of_form(a, theta);
        for b in 0..n {
            let w = ginv.get(a, b);
            if !w.is_zero() {
                acc = acc + w.clone() * nab.coeffs()[b].clone();
            }
        }
    }
    acc
}

/// `g(u, v)` via explicit matrices; convenience for callers holding a
/// lowered representation.
pub fn inner<S: Scalar>(g: &Metric<S>, u: &[S], v: &[S]) -> S {
    dot(u, &g.matrix().apply(v))
}
