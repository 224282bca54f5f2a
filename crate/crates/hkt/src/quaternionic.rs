//! Hypercomplex and hyper-Hermitian structures: quaternion relations, HKT
//! detection, the Obata connection, the Obata Ricci form `Θ`, q-reality and
//! the Ricci foliation `ker Θ`.

use serde::Serialize;
use thiserror::Error;

use crate::complexform::ComplexForm;
use crate::curvature::{Connection, Tensor};
use crate::hermitian::{bismut_connection, bismut_torsion, fundamental_form, lee_form, HermitianData, HermitianError};
use crate::linalg::{basis, Mat, Vector};
use crate::liealg::LieAlgebra;
use crate::multilinear::{invariance_check, Endomorphism, Form, Metric};
use crate::par;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuaternionicError {
    #[error("structures do not satisfy the quaternion relations I² = J² = K² = −1, IJ = K = −JI")]
    NotQuaternionic,
    #[error("structure {0}: {1}")]
    Hermitian(char, HermitianError),
    #[error("Lee forms of I, J, K disagree although the Bismut torsions coincide")]
    LeeFormsDisagree,
    #[error("the structure is not HKT; the Obata formula does not apply")]
    NotHkt,
    #[error("Obata connection check failed: {0} (max residual {1:e})")]
    ObataCheck(&'static str, f64),
    #[error("Obata Ricci form does not equal dθ (max deviation {0:e})")]
    ObataRicciMismatch(f64),
    #[error("the canonical section is not an eigenform of the Obata connection")]
    NotEigenform,
}

/// `I, J, K` as left multiplication by `i, j, k` on `ℍ = ℝ⁴` with basis
/// `1, i, j, k`.
pub fn standard_triple<S: Scalar>() -> (Endomorphism<S>, Endomorphism<S>, Endomorphism<S>) {
    // Left multiplication tables: column c is the image of basis element c.
    let i = quaternion_left(1);
    let j = quaternion_left(2);
    let k = quaternion_left(3);
    (i, j, k)
}

fn quaternion_left<S: Scalar>(unit: usize) -> Endomorphism<S> {
    // products[a][b] = (sign, index) of e_a · e_b for e_0 = 1, e_1 = i, ...
    const TABLE: [[(i64, usize); 4]; 4] = [
        [(1, 0), (1, 1), (1, 2), (1, 3)],
        [(1, 1), (-1, 0), (1, 3), (-1, 2)],
        [(1, 2), (-1, 3), (-1, 0), (1, 1)],
        [(1, 3), (1, 2), (-1, 1), (-1, 0)],
    ];
    let mut m = Mat::zeros(4, 4);
    for (b, &(s, idx)) in TABLE[unit].iter().enumerate() {
        m.set(idx, b, S::from_i64(s));
    }
    m
}

/// Block-diagonal repetition of a 4×4 triple on `ℝ^{4m}`.
pub fn block_triple<S: Scalar>(m: usize) -> (Endomorphism<S>, Endomorphism<S>, Endomorphism<S>) {
    let (i, j, k) = standard_triple::<S>();
    let rep = |a: &Mat<S>| {
        Mat::from_fn(4 * m, 4 * m, |r, c| {
            if r / 4 == c / 4 {
                a.get(r % 4, c % 4).clone()
            } else {
                S::zero()
            }
        })
    };
    (rep(&i), rep(&j), rep(&k))
}

/// Whether `I² = J² = K² = −1` and `IJ = K = −JI` (the remaining relations
/// follow).
pub fn quaternion_check<S: Scalar>(i: &Endomorphism<S>, j: &Endomorphism<S>, k: &Endomorphism<S>) -> bool {
    let n = i.rows();
    let minus = Mat::identity(n).neg();
    i.mul(i).approx_eq(&minus)
        && j.mul(j).approx_eq(&minus)
        && k.mul(k).approx_eq(&minus)
        && i.mul(j).approx_eq(k)
        && j.mul(i).approx_eq(&k.neg())
}

/// A left-invariant hyper-Hermitian structure.
#[derive(Clone, Debug)]
pub struct HyperHermitianData<S: Scalar> {
    pub algebra: LieAlgebra<S>,
    pub g: Metric<S>,
    pub i: Endomorphism<S>,
    pub j: Endomorphism<S>,
    pub k: Endomorphism<S>,
}

impl<S: Scalar> HyperHermitianData<S> {
    /// Validates the quaternion relations and that each `(L, g)` is
    /// Hermitian and integrable.
    pub fn new(
        algebra: LieAlgebra<S>,
        g: Metric<S>,
        i: Endomorphism<S>,
        j: Endomorphism<S>,
        k: Endomorphism<S>,
    ) -> Result<Self, QuaternionicError> {
        let n = algebra.dim();
        if [&i, &j, &k].iter().any(|m| m.rows() != n || m.cols() != n) || !quaternion_check(&i, &j, &k) {
            return Err(QuaternionicError::NotQuaternionic);
        }
        for (name, l) in [('I', &i), ('J', &j), ('K', &k)] {
            HermitianData::new(algebra.clone(), g.clone(), l.clone())
                .map_err(|e| QuaternionicError::Hermitian(name, e))?;
        }
        Ok(HyperHermitianData { algebra, g, i, j, k })
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// The Hermitian structure `(L, g)` for `L ∈ {I, J, K}` (index 0, 1, 2).
    pub fn hermitian(&self, which: usize) -> HermitianData<S> {
        let l = [&self.i, &self.j, &self.k][which].clone();
        HermitianData {
            algebra: self.algebra.clone(),
            g: self.g.clone(),
            j: l,
        }
    }

    pub fn structures(&self) -> [&Endomorphism<S>; 3] {
        [&self.i, &self.j, &self.k]
    }

    /// `ω_L(X,Y) = g(LX, Y)`.
    pub fn omegas(&self) -> [Form<S>; 3] {
        [
            fundamental_form(&self.g, &self.i),
            fundamental_form(&self.g, &self.j),
            fundamental_form(&self.g, &self.k),
        ]
    }

    /// The triple with roles rotated `(I,J,K) → (J,K,I)` `r` times.
    pub fn rotated(&self, r: usize) -> HyperHermitianData<S> {
        let s = [&self.i, &self.j, &self.k];
        HyperHermitianData {
            algebra: self.algebra.clone(),
            g: self.g.clone(),
            i: s[r % 3].clone(),
            j: s[(r + 1) % 3].clone(),
            k: s[(r + 2) % 3].clone(),
        }
    }

    /// Same structure with the metric scaled by `c`.
    pub fn with_metric(&self, g: Metric<S>) -> HyperHermitianData<S> {
        HyperHermitianData {
            algebra: self.algebra.clone(),
            g,
            i: self.i.clone(),
            j: self.j.clone(),
            k: self.k.clone(),
        }
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> HyperHermitianData<T> {
        HyperHermitianData {
            algebra: self.algebra.convert(f),
            g: self.g.convert(f),
            i: self.i.convert(f),
            j: self.j.convert(f),
            k: self.k.convert(f),
        }
    }
}

/// HKT test result.
#[derive(Clone, Debug)]
pub struct HktResult<S: Scalar> {
    pub hkt: bool,
    /// Torsions `H_I, H_J, H_K`.
    pub torsions: [Form<S>; 3],
    /// Relation Lee forms `θ_I, θ_J, θ_K`.
    pub lee: [Form<S>; 3],
    /// Trace-expression Lee forms.
    pub lee_trace: [Form<S>; 3],
    /// Whether the three Bismut connections coincide coefficient-wise.
    pub bismut_agree: bool,
}

impl<S: Scalar> HktResult<S> {
    /// The common torsion (that of `I` when the structure is not HKT).
    pub fn h(&self) -> &Form<S> {
        &self.torsions[0]
    }

    pub fn theta(&self) -> &Form<S> {
        &self.lee[0]
    }
}

/// Computes the three Bismut torsions and Lee forms; HKT iff the torsions
/// coincide. The Lee forms of a hyper-Hermitian structure always coincide,
/// so a disagreement is reported as an error.
pub fn is_hkt<S: Scalar>(q: &HyperHermitianData<S>) -> Result<HktResult<S>, QuaternionicError> {
    let per: Vec<Result<(Form<S>, Form<S>, Form<S>, Connection<S>), QuaternionicError>> = par::map_range(3, |w| {
        let h = q.hermitian(w);
        let name = ['I', 'J', 'K'][w];
        let lee = lee_form(&h).map_err(|e| QuaternionicError::Hermitian(name, e))?;
        Ok((bismut_torsion(&h), lee.theta, lee.trace, bismut_connection(&h)))
    });
    let mut torsions = Vec::new();
    let mut lee = Vec::new();
    let mut lee_trace = Vec::new();
    let mut conns = Vec::new();
    for r in per {
        let (h, t, tt, c) = r?;
        torsions.push(h);
        lee.push(t);
        lee_trace.push(tt);
        conns.push(c);
    }
    if !(lee[0].approx_eq(&lee[1]) && lee[0].approx_eq(&lee[2])) {
        return Err(QuaternionicError::LeeFormsDisagree);
    }
    let hkt = torsions[0].approx_eq(&torsions[1]) && torsions[0].approx_eq(&torsions[2]);
    let bismut_agree = conns[0].approx_eq(&conns[1]) && conns[0].approx_eq(&conns[2]);
    let arr = |v: Vec<Form<S>>| -> [Form<S>; 3] { v.try_into().expect("three forms") };
    Ok(HktResult {
        hkt,
        torsions: arr(torsions),
        lee: arr(lee),
        lee_trace: arr(lee_trace),
        bismut_agree,
    })
}

/// Lowered correction tensor
/// `2A(X,Y,Z) = −H(X,IY,IZ) − H(IX,IY,Z) − H(X,KY,KZ) − H(IX,KY,JZ)`.
pub fn obata_tensor<S: Scalar>(q: &HyperHermitianData<S>, h: &Form<S>) -> Tensor<S> {
    let n = q.dim();
    let col = |m: &Mat<S>, x: usize| m.column(x);
    let half = S::half();
    Tensor::from_fn(n, 3, |t| {
        let (x, y, z) = (t[0], t[1], t[2]);
        let ex = basis::<S>(n, x);
        let ez = basis::<S>(n, z);
        let (ix, iy, iz) = (col(&q.i, x), col(&q.i, y), col(&q.i, z));
        let (ky, kz) = (col(&q.k, y), col(&q.k, z));
        let jz = col(&q.j, z);
        let s = h.eval_vectors(&[&ex, &iy, &iz])
            + h.eval_vectors(&[&ix, &iy, &ez])
            + h.eval_vectors(&[&ex, &ky, &kz])
            + h.eval_vectors(&[&ix, &ky, &jz]);
        -(half.clone() * s)
    })
}

fn obata_unchecked<S: Scalar>(q: &HyperHermitianData<S>, h: &Form<S>) -> Connection<S> {
    let bis = bismut_connection(&q.hermitian(0));
    bis.add_lowered(&q.g, &obata_tensor(q, h))
}

/// Obata connection `g(∇^{Ob}_X Y, Z) = g(∇^B_X Y, Z) + A(X,Y,Z)` of an
/// HKT structure, verified to be torsion-free, to preserve `I, J, K`, and
/// to be the same for all three cyclic role assignments.
pub fn obata_connection<S: Scalar>(q: &HyperHermitianData<S>) -> Result<Connection<S>, QuaternionicError> {
    let hk = is_hkt(q)?;
    if !hk.hkt {
        return Err(QuaternionicError::NotHkt);
    }
    let ob = obata_unchecked(q, hk.h());
    let tor = ob.torsion(&q.algebra);
    if !tor.is_zero() {
        return Err(QuaternionicError::ObataCheck("torsion", tor.max_abs()));
    }
    for l in q.structures() {
        if !ob.preserves(l) {
            return Err(QuaternionicError::ObataCheck("parallel structure", ob.endo_defect(l)));
        }
    }
    for r in 1..3 {
        let other = obata_unchecked(&q.rotated(r), hk.h());
        if !other.approx_eq(&ob) {
            return Err(QuaternionicError::ObataCheck("role independence", other.max_diff(&ob)));
        }
    }
    Ok(ob)
}

/// `Ω = ω_J + i ω_K`.
pub fn omega_complex<S: Scalar>(q: &HyperHermitianData<S>) -> ComplexForm<S> {
    let [_, wj, wk] = q.omegas();
    ComplexForm::new(wj, wk)
}

/// Connection form `α` of the induced connection on the canonical section:
/// `∇_X Ω^n = α(X) Ω^n` (`4n` = real dimension). Returns the real part and
/// fails if `Ω^n` is not an eigenform or the eigenvalue is not real.
pub fn canonical_connection_form<S: Scalar>(
    conn: &Connection<S>,
    q: &HyperHermitianData<S>,
) -> Result<Form<S>, QuaternionicError> {
    let n = q.dim();
    let top = omega_complex(q).wedge_power(n / 4);
    // Pick the largest coefficient of the section as the normalising slot.
    let (slot, _) = top
        .re
        .coeffs()
        .iter()
        .zip(top.im.coeffs())
        .enumerate()
        .map(|(p, (a, b))| (p, a.magnitude() + b.magnitude()))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let (pr, pi) = (top.re.coeffs()[slot].clone(), top.im.coeffs()[slot].clone());
    let norm = pr.clone() * pr.clone() + pi.clone() * pi.clone();
    let mut alpha = Vec::with_capacity(n);
    for x in 0..n {
        let nab = top.derivation(conn.gamma(x)).scale_real(&S::from_i64(-1));
        let (nr, ni) = (nab.re.coeffs()[slot].clone(), nab.im.coeffs()[slot].clone());
        // (nr + i ni) / (pr + i pi)
        let a = (nr.clone() * pr.clone() + ni.clone() * pi.clone()) / norm.clone();
        let b = (ni * pr.clone() - nr * pi.clone()) / norm.clone();
        if !nab.sub(&top.scale(&a, &b)).is_zero() || !b.is_zero() {
            return Err(QuaternionicError::NotEigenform);
        }
        alpha.push(a);
    }
    Ok(Form::one_form(&alpha))
}

/// Obata Ricci data.
#[derive(Clone, Debug)]
pub struct ObataRicci<S: Scalar> {
    pub alpha: Form<S>,
    /// `Θ = dα`.
    pub theta_form: Form<S>,
    /// `dθ` for comparison.
    pub d_theta: Form<S>,
    /// Whether `Θ` is invariant under `I`, `J` and `K`.
    pub type_11: bool,
}

/// `Θ = dα` for the Obata connection; asserts `Θ = dθ`.
pub fn obata_ricci<S: Scalar>(q: &HyperHermitianData<S>) -> Result<ObataRicci<S>, QuaternionicError> {
    let ob = obata_connection(q)?;
    let hk = is_hkt(q)?;
    let alpha = canonical_connection_form(&ob, q)?;
    let theta_form = q.algebra.d(&alpha);
    let d_theta = q.algebra.d(hk.theta());
    if !theta_form.approx_eq(&d_theta) {
        return Err(QuaternionicError::ObataRicciMismatch(theta_form.max_diff(&d_theta)));
    }
    let type_11 = invariance_check(&theta_form, &q.structures());
    Ok(ObataRicci {
        alpha,
        theta_form,
        d_theta,
        type_11,
    })
}

/// `J conj(Ω) = Ω` and `Ω` of type `(2,0)` for `I`.
pub fn q_real_check<S: Scalar>(q: &HyperHermitianData<S>) -> bool {
    if !quaternion_check(&q.i, &q.j, &q.k) {
        return false;
    }
    let om = omega_complex(q);
    om.conj().j_act(&q.j).sub(&om).is_zero() && om.is_type_k0(&q.i)
}

/// Kernel, rank and eigenvalue pairing of the Ricci foliation `ker Θ`.
#[derive(Clone, Debug)]
pub struct RicciFoliation<S: Scalar> {
    pub kernel: Vec<Vector<S>>,
    pub rank: usize,
    /// Characteristic polynomial of `g^{-1}Θ` satisfies `p(−λ) = ±p(λ)`.
    pub pairing_ok: bool,
    pub rank_even: bool,
    pub rank_below_dim: bool,
}

pub fn ricci_foliation<S: Scalar>(theta_form: &Form<S>, g: &Metric<S>) -> RicciFoliation<S> {
    let n = g.dim();
    let m = theta_form.to_matrix();
    // endomorphism A with g(AX, Y) = Θ(X, Y): A = g^{-1} Θ^T
    let a = g.inverse().mul(&m.transpose());
    let kernel = m.kernel();
    let rank = m.rank();
    let cp = a.charpoly();
    // coefficients c_0..c_n; p(−λ) = (−1)^n p(λ) iff c_i = 0 whenever n − i is odd
    let pairing_ok = cp.iter().enumerate().all(|(i, c)| (n - i) % 2 == 0 || c.is_zero());
    RicciFoliation {
        kernel,
        rank,
        pairing_ok,
        rank_even: rank % 2 == 0,
        rank_below_dim: rank < n,
    }
}

/// Hyper-Hermitian classification flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HyperFlags {
    pub hkt: bool,
    pub strong_hkt: bool,
    pub hyperkahler: bool,
    pub balanced: bool,
    pub parallel_torsion: bool,
}

#[derive(Clone, Debug)]
pub struct HyperReport<S: Scalar> {
    pub flags: HyperFlags,
    pub h: Form<S>,
    pub theta: Form<S>,
    pub theta_trace: Form<S>,
    pub obata: Option<Connection<S>>,
    pub obata_ricci: Option<Form<S>>,
}

pub fn classify_hyper<S: Scalar>(q: &HyperHermitianData<S>) -> Result<HyperReport<S>, QuaternionicError> {
    let hk = is_hkt(q)?;
    let h = hk.h().clone();
    let bis = bismut_connection(&q.hermitian(0));
    let strong = hk.hkt && q.algebra.d(&h).is_zero();
    let flags = HyperFlags {
        hkt: hk.hkt,
        strong_hkt: strong,
        hyperkahler: hk.torsions.iter().all(|t| t.is_zero()),
        balanced: hk.theta().is_zero(),
        parallel_torsion: hk.hkt && bis.is_parallel_form(&h),
    };
    let (obata, obata_ricci) = if hk.hkt {
        let ob = obata_connection(q)?;
        let r = obata_ricci(q)?;
        (Some(ob), Some(r.theta_form))
    } else {
        (None, None)
    };
    Ok(HyperReport {
        flags,
        h,
        theta: hk.lee[0].clone(),
        theta_trace: hk.lee_trace[0].clone(),
        obata,
        obata_ricci,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::su2;
    use crate::scalar::Exact;

    fn hopf() -> HyperHermitianData<Exact> {
        // su(2) on e1..e3 and a central e4; quaternion left multiplication
        // with e4 ↔ 1 and e1, e2, e3 ↔ i, j, k.
        let alg = su2::<Exact>().direct_sum(&LieAlgebra::abelian(1));
        let (i, j, k) = standard_triple::<Exact>();
        let p = Mat::from_fn(4, 4, |r, c| {
            // basis permutation: quaternion index q ↦ algebra index (q + 3) % 4
            if r == (c + 3) % 4 {
                Exact::int(1)
            } else {
                Exact::int(0)
            }
        });
        let pinv = p.transpose();
        let conj = |m: &Mat<Exact>| p.mul(m).mul(&pinv);
        HyperHermitianData::new(alg, Metric::identity(4), conj(&i), conj(&j), conj(&k)).unwrap()
    }

    #[test]
    fn quaternion_examples() {
        let (i, j, k) = standard_triple::<Exact>();
        assert!(quaternion_check(&i, &j, &k));
        assert!(!quaternion_check(&i, &j, &k.neg()));
        assert!(!quaternion_check(&i, &k, &j));
    }

    #[test]
    fn flat_hyperkahler() {
        let (i, j, k) = block_triple::<Exact>(2);
        let q = HyperHermitianData::new(LieAlgebra::abelian(8), Metric::identity(8), i, j, k).unwrap();
        let r = classify_hyper(&q).unwrap();
        assert!(r.flags.hkt && r.flags.strong_hkt && r.flags.hyperkahler && r.flags.balanced);
        assert!(r.h.is_zero());
        let ob = r.obata.unwrap();
        assert!(ob.approx_eq(&Connection::flat_left(8)));
        assert!(r.obata_ricci.unwrap().is_zero());
        assert!(q_real_check(&q));
    }

    #[test]
    fn hopf_is_hkt_with_closed_theta() {
        let q = hopf();
        let r = classify_hyper(&q).unwrap();
        assert!(r.flags.hkt && r.flags.strong_hkt && !r.flags.hyperkahler && r.flags.parallel_torsion);
        assert!(!r.theta.is_zero());
        assert!(r.obata_ricci.unwrap().is_zero());
        assert!(q_real_check(&q));
        let f = ricci_foliation(&q.algebra.d(&r.theta), &q.g);
        assert_eq!(f.rank, 0);
        assert_eq!(f.kernel.len(), 4);
    }

    #[test]
    fn swapped_triple_rejected() {
        let (i, j, k) = standard_triple::<Exact>();
        assert!(matches!(
            HyperHermitianData::new(LieAlgebra::abelian(4), Metric::identity(4), i, k, j),
            Err(QuaternionicError::NotQuaternionic)
        ));
    }
}
