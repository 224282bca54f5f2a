//! Hermitian structures on a Lie algebra: integrability, fundamental form,
//! Bismut torsion, the Gauduchon line of Hermitian connections, the
//! Levi-Civita connection, the Lee form and the Kähler / SKT / balanced /
//! CYT / BHE / generalized-Einstein classification.
//!
//! Conventions: `ω(X,Y) = g(JX,Y)`, `d^cω = J dω` with
//! `(Jα)(X,Y,Z) = α(−JX,−JY,−JZ)`, and `H(X,Y,Z) = dω(JX,JY,JZ) = −d^cω`.
//! Every trace is a metric-inverse contraction, so no orthonormal frame
//! (and no square root) is ever needed.

use serde::Serialize;
use thiserror::Error;

use crate::curvature::{
    codifferential, curvature, divergence_of_one_form, h_squared, ricci_traces, Connection, CurvatureTensor,
    Tensor,
};
use crate::linalg::{basis, vis_zero, vsub, Mat, Vector};
use crate::liealg::LieAlgebra;
use crate::multilinear::{is_almost_complex, Endomorphism, Form, Metric};
use crate::par;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HermitianError {
    #[error("dimension mismatch between algebra ({0}), metric and complex structure ({1})")]
    DimensionMismatch(usize, usize),
    #[error("endomorphism does not square to minus the identity")]
    NotAlmostComplex,
    #[error("complex structure is not orthogonal for the metric")]
    NotCompatible,
    #[error("complex structure is not integrable (Nijenhuis tensor non-zero on [e{0}, e{1}])")]
    NotIntegrable(usize, usize),
    #[error("Lee form relation dω^(n-1) = θ∧ω^(n-1) has no solution")]
    LeeRelationUnsolvable,
    #[error("Lee form cross-check failed: trace expression is not −θ (max deviation {0:e})")]
    LeeMismatch(f64),
}

/// A left-invariant Hermitian structure `(g, J)` on a Lie algebra.
#[derive(Clone, Debug)]
pub struct HermitianData<S: Scalar> {
    pub algebra: LieAlgebra<S>,
    pub g: Metric<S>,
    pub j: Endomorphism<S>,
}

impl<S: Scalar> HermitianData<S> {
    /// Validates `J² = −1`, `g(J·,J·) = g` and integrability.
    pub fn new(algebra: LieAlgebra<S>, g: Metric<S>, j: Endomorphism<S>) -> Result<Self, HermitianError> {
        let n = algebra.dim();
        if g.dim() != n || j.rows() != n || j.cols() != n {
            return Err(HermitianError::DimensionMismatch(n, j.rows()));
        }
        if !is_almost_complex(&j) {
            return Err(HermitianError::NotAlmostComplex);
        }
        if !g.is_compatible(&j) {
            return Err(HermitianError::NotCompatible);
        }
        if let Some((x, y)) = first_nijenhuis_violation(&algebra, &j) {
            return Err(HermitianError::NotIntegrable(x, y));
        }
        Ok(HermitianData { algebra, g, j })
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> HermitianData<T> {
        HermitianData {
            algebra: self.algebra.convert(f),
            g: self.g.convert(f),
            j: self.j.convert(f),
        }
    }
}

// ---------------------------------------------------------------------------
// Integrability
// ---------------------------------------------------------------------------

/// `N(e_x, e_y) = [Je_x,Je_y] − [e_x,e_y] − J[Je_x,e_y] − J[e_x,Je_y]`,
/// returned for all ordered basis pairs (index `x·n + y`).
pub fn nijenhuis<S: Scalar>(alg: &LieAlgebra<S>, j: &Endomorphism<S>) -> Vec<Vector<S>> {
    let n = alg.dim();
    par::map_range(n * n, |t| {
        let (x, y) = (t / n, t % n);
        let (ex, ey) = (basis::<S>(n, x), basis::<S>(n, y));
        let (jx, jy) = (j.column(x), j.column(y));
        let a = alg.bracket(&jx, &jy);
        let b = alg.bracket(&ex, &ey);
        let c = j.apply(&alg.bracket(&jx, &ey));
        let d = j.apply(&alg.bracket(&ex, &jy));
        vsub(&vsub(&vsub(&a, &b), &c), &d)
    })
}

fn first_nijenhuis_violation<S: Scalar>(alg: &LieAlgebra<S>, j: &Endomorphism<S>) -> Option<(usize, usize)> {
    let n = alg.dim();
    nijenhuis(alg, j)
        .iter()
        .position(|v| !vis_zero(v))
        .map(|t| (t / n, t % n))
}

/// Whether the Nijenhuis tensor vanishes.
pub fn is_integrable<S: Scalar>(alg: &LieAlgebra<S>, j: &Endomorphism<S>) -> bool {
    first_nijenhuis_violation(alg, j).is_none()
}

// ---------------------------------------------------------------------------
// Forms
// ---------------------------------------------------------------------------

/// `ω(X,Y) = g(JX,Y)`.
pub fn fundamental_form<S: Scalar>(g: &Metric<S>, j: &Endomorphism<S>) -> Form<S> {
    let m = j.transpose().mul(g.matrix());
    Form::from_matrix(&m)
}

/// Bismut torsion `H(X,Y,Z) = dω(JX,JY,JZ)`.
pub fn bismut_torsion<S: Scalar>(h: &HermitianData<S>) -> Form<S> {
    let omega = fundamental_form(&h.g, &h.j);
    h.algebra.d(&omega).pullback(&h.j)
}

/// `d^cω = J dω` with the signed action `(Jα)(X,…) = α(−JX,…)`.
pub fn dc_omega<S: Scalar>(h: &HermitianData<S>) -> Form<S> {
    let omega = fundamental_form(&h.g, &h.j);
    h.algebra.d(&omega).j_act(&h.j)
}

/// Residual of `H(X,Y,Z) = H(JX,JY,Z) + H(JX,Y,JZ) + H(X,JY,JZ)`.
pub fn useful_identity_residual<S: Scalar>(hf: &Form<S>, j: &Endomorphism<S>) -> Form<S> {
    let n = hf.dim();
    let cols: Vec<Vector<S>> = (0..n).map(|i| j.column(i)).collect();
    Form::from_fn(n, 3, |t| {
        let (x, y, z) = (basis::<S>(n, t[0]), basis::<S>(n, t[1]), basis::<S>(n, t[2]));
        let (jx, jy, jz) = (&cols[t[0]], &cols[t[1]], &cols[t[2]]);
        let rhs = hf.eval_vectors(&[jx, jy, &z]) + hf.eval_vectors(&[jx, &y, jz]) + hf.eval_vectors(&[&x, jy, jz]);
        hf.eval_indices(t) - rhs
    })
}

// ---------------------------------------------------------------------------
// Connections
// ---------------------------------------------------------------------------

/// Levi-Civita connection from the Koszul formula for invariant fields:
/// `2g(∇_X Y, Z) = g([X,Y],Z) − g([Y,Z],X) + g([Z,X],Y)`.
pub fn levi_civita<S: Scalar>(alg: &LieAlgebra<S>, g: &Metric<S>) -> Connection<S> {
    let n = alg.dim();
    let half = S::half();
    let b = |x: usize, y: usize, z: usize| g.inner(alg.bracket_basis(x, y), &basis(n, z));
    let lowered = Tensor::from_fn(n, 3, |t| {
        let (x, y, z) = (t[0], t[1], t[2]);
        half.clone() * (b(x, y, z) - b(y, z, x) + b(z, x, y))
    });
    Connection::from_lowered(g, &lowered)
}

/// Point `t` of the Gauduchon line:
/// `g(∇^t_X Y,Z) = g(∇^{LC}_X Y,Z) + (t−1)/4·d^cω(X,Y,Z) + (t+1)/4·d^cω(X,JY,JZ)`.
pub fn gauduchon_connection<S: Scalar>(h: &HermitianData<S>, t: &S) -> Connection<S> {
    let n = h.dim();
    let lc = levi_civita(&h.algebra, &h.g);
    let dc = dc_omega(h);
    let a = (t.clone() - S::one()) / S::from_i64(4);
    let b = (t.clone() + S::one()) / S::from_i64(4);
    let cols: Vec<Vector<S>> = (0..n).map(|i| h.j.column(i)).collect();
    let extra = Tensor::from_fn(n, 3, |i| {
        let x = basis::<S>(n, i[0]);
        a.clone() * dc.eval_indices(i) + b.clone() * dc.eval_vectors(&[&x, &cols[i[1]], &cols[i[2]]])
    });
    lc.add_lowered(&h.g, &extra)
}

/// Bismut connection (`t = −1`).
pub fn bismut_connection<S: Scalar>(h: &HermitianData<S>) -> Connection<S> {
    gauduchon_connection(h, &S::from_i64(-1))
}

/// Chern connection (`t = 1`).
pub fn chern_connection<S: Scalar>(h: &HermitianData<S>) -> Connection<S> {
    gauduchon_connection(h, &S::one())
}

/// Largest entry of the `(1,1)`-part `T(X,Y) + T(JX,JY)` of a torsion tensor.
pub fn torsion_11_part<S: Scalar>(conn: &Connection<S>, h: &HermitianData<S>) -> f64 {
    let n = h.dim();
    let t = conn.torsion(&h.algebra);
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            let a = t.at(x, y);
            let b = t.apply(&h.j.column(x), &h.j.column(y));
            let s: Vector<S> = a.iter().zip(&b).map(|(p, q)| p.clone() + q.clone()).collect();
            worst = worst.max(crate::linalg::vmax_abs(&s));
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Lee form
// ---------------------------------------------------------------------------

/// Both Lee-form computations.
#[derive(Clone, Debug)]
pub struct LeeForm<S: Scalar> {
    /// The form characterised by `dω^{n−1} = θ ∧ ω^{n−1}`.
    pub theta: Form<S>,
    /// The trace expression `½ Σ_i H(e_i, Je_i, JX)`.
    pub trace: Form<S>,
}

/// `½ Σ_{a,b} g^{ab} H(e_a, Je_b, JX)`.
pub fn lee_trace<S: Scalar>(g: &Metric<S>, j: &Endomorphism<S>, hf: &Form<S>) -> Form<S> {
    let n = g.dim();
    let ginv = g.inverse();
    let cols: Vec<Vector<S>> = (0..n).map(|i| j.column(i)).collect();
    let coeffs: Vec<S> = (0..n)
        .map(|x| {
            let mut acc = S::zero();
            for a in 0..n {
                let ea = basis::<S>(n, a);
                for b in 0..n {
                    let w = ginv.get(a, b);
                    if w.is_zero() {
                        continue;
                    }
                    acc = acc + w.clone() * hf.eval_vectors(&[&ea, &cols[b], &cols[x]]);
                }
            }
            S::half() * acc
        })
        .collect();
    Form::one_form(&coeffs)
}

/// Solves `dω^{m−1} = θ ∧ ω^{m−1}` (real dimension `2m`).
pub fn lee_relation<S: Scalar>(alg: &LieAlgebra<S>, omega: &Form<S>) -> Result<Form<S>, HermitianError> {
    let n = alg.dim();
    let m = n / 2;
    if m == 0 {
        return Ok(Form::zero(n, 1));
    }
    let power = omega.wedge_power(m - 1);
    let rhs = alg.d(&power);
    let columns: Vec<Vector<S>> = (0..n)
        .map(|i| Form::basis(n, &[i]).wedge(&power).coeffs().to_vec())
        .collect();
    let rows = rhs.coeffs().len();
    let sys = Mat::from_columns(&columns, rows);
    let sol = sys.solve(rhs.coeffs()).ok_or(HermitianError::LeeRelationUnsolvable)?;
    Ok(Form::one_form(&sol))
}

/// Lee form with the built-in consistency check: the trace expression must
/// equal `−θ` exactly (within tolerance in float mode); anything else is an
/// internal convention error.
pub fn lee_form<S: Scalar>(h: &HermitianData<S>) -> Result<LeeForm<S>, HermitianError> {
    let omega = fundamental_form(&h.g, &h.j);
    let theta = lee_relation(&h.algebra, &omega)?;
    let trace = lee_trace(&h.g, &h.j, &bismut_torsion(h));
    if !trace.add(&theta).is_zero() {
        return Err(HermitianError::LeeMismatch(trace.add(&theta).max_abs()));
    }
    Ok(LeeForm { theta, trace })
}

// ---------------------------------------------------------------------------
// Ricci forms and classification
// ---------------------------------------------------------------------------

/// Bismut Ricci data.
#[derive(Clone, Debug)]
pub struct BismutRicci<S: Scalar> {
    /// `ρ^B(X,Y) = ½ Σ_i R^B(X,Y,Je_i,e_i)`.
    pub rho: Form<S>,
    /// `Ric^B(X,Y) = Σ_i R^B(e_i,X,Y,e_i)`.
    pub ric: Mat<S>,
    /// Residual of `ρ^B(X,Y) = −Ric^B(X,JY) − (∇^B_X θ)(JY)`.
    pub rhob2_residual: Mat<S>,
}

/// `(∇_X θ)(Z) = −θ(∇_X Z)` as a matrix `[x][z]`.
pub fn nabla_one_form<S: Scalar>(conn: &Connection<S>, theta: &Form<S>) -> Mat<S> {
    let n = theta.dim();
    let t = theta.coeffs();
    Mat::from_fn(n, n, |x, z| {
        let col = conn.gamma(x).column(z);
        -crate::linalg::dot(t, &col)
    })
}

pub fn bismut_ricci<S: Scalar>(h: &HermitianData<S>, theta: &Form<S>) -> BismutRicci<S> {
    let bis = bismut_connection(h);
    let r = curvature(&bis, &h.algebra, &h.g);
    bismut_ricci_from(h, &bis, &r, theta)
}

fn bismut_ricci_from<S: Scalar>(
    h: &HermitianData<S>,
    bis: &Connection<S>,
    r: &CurvatureTensor<S>,
    theta: &Form<S>,
) -> BismutRicci<S> {
    let n = h.dim();
    let tr = ricci_traces(r, &h.g, Some(&h.j));
    let rho = tr.rho.expect("complex structure supplied");
    let ric = tr.ric;
    let nt = nabla_one_form(bis, theta);
    // Ric^B(X,JY) = Σ_c J[c][y] Ric[x][c];  (∇_Xθ)(JY) likewise.
    let ric_j = ric.mul(&h.j);
    let nt_j = nt.mul(&h.j);
    let rhob2_residual = Mat::from_fn(n, n, |x, y| {
        rho.eval_indices(&[x, y]) + ric_j.get(x, y).clone() + nt_j.get(x, y).clone()
    });
    BismutRicci {
        rho,
        ric,
        rhob2_residual,
    }
}

/// Boolean classification plus the computed invariants.
#[derive(Clone, Debug)]
pub struct HermitianReport<S: Scalar> {
    pub flags: HermitianFlags,
    pub omega: Form<S>,
    pub theta: Form<S>,
    pub theta_trace: Form<S>,
    pub h: Form<S>,
    pub rho_b: Form<S>,
    pub ric_b: Mat<S>,
    pub ric_lc: Mat<S>,
    pub h2: Mat<S>,
    pub rhob2_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HermitianFlags {
    pub kahler: bool,
    pub skt: bool,
    pub balanced: bool,
    pub cyt: bool,
    pub bhe: bool,
    pub generalized_einstein: bool,
    /// `Ric^{LC} = ¼H²`.
    pub ric_lc_quarter_h2: bool,
    /// `δH = 0`.
    pub coclosed_torsion: bool,
    /// `Σ_i (∇^{LC}_{e_i} θ)(e_i) = 0`.
    pub gauduchon: bool,
    /// Lemma: `H = H(J,J,·) + H(J,·,J) + H(·,J,J)`.
    pub torsion_type_identity: bool,
    /// `ρ^B = −Ric^B(·,J·) − (∇^Bθ)(J·)`.
    pub rhob2_identity: bool,
}

pub fn classify_hermitian<S: Scalar>(h: &HermitianData<S>) -> Result<HermitianReport<S>, HermitianError> {
    let omega = fundamental_form(&h.g, &h.j);
    let domega = h.algebra.d(&omega);
    let hf = bismut_torsion(h);
    let lee = lee_form(h)?;
    let lc = levi_civita(&h.algebra, &h.g);
    let bis = bismut_connection(h);
    let rb = curvature(&bis, &h.algebra, &h.g);
    let br = bismut_ricci_from(h, &bis, &rb, &lee.theta);
    let rlc = curvature(&lc, &h.algebra, &h.g);
    let ric_lc = ricci_traces(&rlc, &h.g, None).ric;
    let h2 = h_squared(&hf, &h.g);
    let quarter = S::from_ratio(1, 4);
    let skt = h.algebra.d(&hf).is_zero();
    let cyt = br.rho.is_zero();
    let flags = HermitianFlags {
        kahler: domega.is_zero(),
        skt,
        balanced: lee.theta.is_zero(),
        cyt,
        bhe: skt && cyt,
        generalized_einstein: br.ric.is_zero(),
        ric_lc_quarter_h2: ric_lc.sub(&h2.scale(&quarter)).is_zero(),
        coclosed_torsion: codifferential(&lc, &h.g, &hf).is_zero(),
        gauduchon: divergence_of_one_form(&lc, &h.g, &lee.theta).is_zero(),
        torsion_type_identity: useful_identity_residual(&hf, &h.j).is_zero(),
        rhob2_identity: br.rhob2_residual.is_zero(),
    };
    Ok(HermitianReport {
        flags,
        omega,
        theta: lee.theta,
        theta_trace: lee.trace,
        h: hf,
        rho_b: br.rho,
        ric_b: br.ric,
        ric_lc,
        h2,
        rhob2_residual: br.rhob2_residual.max_abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::su2;
    use crate::scalar::Exact;

    fn q(n: i64) -> Exact {
        Exact::int(n)
    }

    fn hopf() -> HermitianData<Exact> {
        // su(2) on e1..e3, central e4; J e4 = e1, J e2 = e3.
        let su = su2::<Exact>();
        let alg = su.direct_sum(&LieAlgebra::abelian(1));
        let mut j = Mat::zeros(4, 4);
        j.set(0, 3, q(1));
        j.set(3, 0, q(-1));
        j.set(2, 1, q(1));
        j.set(1, 2, q(-1));
        HermitianData::new(alg, Metric::identity(4), j).unwrap()
    }

    #[test]
    fn fundamental_form_example() {
        // J e1 = e2, J e3 = e4: ω(e1, e2) = g(e2, e2) = 1.
        let mut j = Mat::zeros(4, 4);
        j.set(1, 0, q(1));
        j.set(0, 1, q(-1));
        j.set(3, 2, q(1));
        j.set(2, 3, q(-1));
        let w = fundamental_form(&Metric::identity(4), &j);
        let std = Form::basis(4, &[0, 1]).add(&Form::basis(4, &[2, 3]));
        assert!(w.sub(&std).is_zero());
        // The opposite structure (J e2 = e1, J e4 = e3) gives e^{21} + e^{43}.
        let w2 = fundamental_form(&Metric::identity(4), &j.neg());
        assert!(w2.add(&std).is_zero());
        assert!(!w.wedge(&w).is_zero());
        assert!(crate::multilinear::invariance_check(&w, &[&j]));
    }

    #[test]
    fn abelian_is_kahler_flat() {
        let mut j = Mat::zeros(4, 4);
        j.set(1, 0, q(1));
        j.set(0, 1, q(-1));
        j.set(3, 2, q(1));
        j.set(2, 3, q(-1));
        let h = HermitianData::new(LieAlgebra::abelian(4), Metric::identity(4), j).unwrap();
        let r = classify_hermitian(&h).unwrap();
        assert!(r.h.is_zero());
        let f = r.flags;
        assert!(f.kahler && f.skt && f.balanced && f.cyt && f.bhe && f.generalized_einstein);
        let lc = levi_civita(&h.algebra, &h.g);
        for t in -2..3 {
            assert!(gauduchon_connection(&h, &q(t)).approx_eq(&lc));
        }
    }

    #[test]
    fn hopf_structure() {
        let h = hopf();
        assert!(is_integrable(&h.algebra, &h.j));
        let hf = bismut_torsion(&h);
        // H is a multiple of the su(2) volume form.
        let vol = Form::basis(4, &[0, 1, 2]);
        let c = hf.eval_indices(&[0, 1, 2]);
        assert!(!c.is_zero());
        assert!(hf.sub(&vol.scale(&c)).is_zero());
        let lee = lee_form(&h).unwrap();
        assert!(lee.theta.coeffs()[..3].iter().all(|x| x.is_zero()));
        assert!(!lee.theta.coeffs()[3].is_zero());
        let r = classify_hermitian(&h).unwrap();
        assert!(r.flags.skt && !r.flags.kahler && !r.flags.balanced);
        assert!(r.flags.torsion_type_identity && r.flags.gauduchon);
        // Chern torsion has no (1,1)-part.
        assert_eq!(torsion_11_part(&chern_connection(&h), &h), 0.0);
    }

    #[test]
    fn non_integrable_rejected() {
        // A shear-conjugate of the Hopf structure fails integrability.
        let alg = su2::<Exact>().direct_sum(&LieAlgebra::abelian(1));
        let j = Mat::from_rows(vec![
            vec![q(0), q(0), q(-1), q(1)],
            vec![q(0), q(0), q(-1), q(0)],
            vec![q(0), q(1), q(0), q(0)],
            vec![q(-1), q(1), q(0), q(0)],
        ]);
        assert!(crate::multilinear::is_almost_complex(&j));
        assert!(!is_integrable(&alg, &j));
        assert!(HermitianData::new(alg, Metric::identity(4), j).is_err());
        assert!(is_integrable(&LieAlgebra::<Exact>::abelian(4), &Mat::from_rows(vec![
            vec![q(0), q(0), q(-1), q(1)],
            vec![q(0), q(0), q(-1), q(0)],
            vec![q(0), q(1), q(0), q(0)],
            vec![q(-1), q(1), q(0), q(0)],
        ])));
    }

    #[test]
    fn levi_civita_bi_invariant_su2() {
        let su = su2::<Exact>();
        let lc = levi_civita(&su, &Metric::identity(3));
        for x in 0..3 {
            for y in 0..3 {
                let lhs = lc.gamma(x).column(y);
                let rhs: Vec<Exact> = su.bracket_basis(x, y).iter().map(|c| c.clone() * Exact::ratio(1, 2)).collect();
                assert_eq!(lhs, rhs);
            }
        }
        assert!(lc.torsion(&su).is_zero());
        assert!(lc.is_metric(&Metric::identity(3)));
    }

    #[test]
    fn gauduchon_line_is_hermitian() {
        let h = hopf();
        for t in [-1, 0, 1, 3] {
            let c = gauduchon_connection(&h, &q(t));
            assert!(c.is_metric(&h.g));
            assert!(c.preserves(&h.j));
        }
        let b = bismut_connection(&h);
        let tor = b.torsion(&h.algebra);
        assert!(tor.is_totally_skew(&h.g));
        let hf = Tensor::from_form(&bismut_torsion(&h));
        assert!(tor.lowered(&h.g).sub(&hf).is_zero());
    }
}
