//! Structure theory of 8-dimensional strong HKT, non-hyper-Kähler invariant
//! structures: the Euler field `V`, the vertical algebra spanned by
//! `V, IV, JV, KV`, the constants `a` and `b`, the horizontal SD/ASD
//! decomposition, the forms `β_L` and `η_L`, and the identities between
//! them (balance, rotational, Obata–Euler, HKT-Einstein, curvature
//! components, the five-way equivalence, and the potential form).
//!
//! Conventions: `V = ½ θ_tr^♯` where `θ_tr(X) = ½ Σ g^{ab} H(e_a, Ie_b, IX)`
//! (equivalently `V = −½ θ^♯` for the relation Lee form `θ`). Norms of forms
//! are full index sums. Curvature components are evaluated on an adapted
//! horizontal frame `ξ, Iξ, Jξ, Kξ`; all identities are multilinear, so the
//! frame is not normalised (this avoids a square-root extension).

use serde::Serialize;
use thiserror::Error;

use crate::check::{residual, Check};
use crate::complexform::{one_zero_part, ComplexForm};
use crate::curvature::{curvature, lc_from_bismut_residual, ricci_traces, Connection, CurvatureTensor};
use crate::hermitian::{bismut_connection, chern_connection, levi_civita};
use crate::linalg::{basis, vis_zero, Mat, Span, Vector};
use crate::multilinear::{invariance_check, Endomorphism, Form, Metric};
use crate::quaternionic::{is_hkt, obata_connection, omega_complex, HyperHermitianData, QuaternionicError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Structure8Error {
    #[error("structure analysis needs real dimension 8, got {0}")]
    Dimension(usize),
    #[error(transparent)]
    Quaternionic(#[from] QuaternionicError),
    #[error("the structure is not HKT")]
    NotHkt,
    #[error("the structure is HKT but not strong (dH ≠ 0)")]
    NotStrong,
    #[error("the Lee form vanishes (hyper-Kähler candidate); the Euler field is zero")]
    HyperKahler,
    #[error("the Euler field is not Bismut-parallel; entry outside the regime of the structure theory")]
    NotBismutParallel,
    #[error("the square norm of the Euler field is not a square-free rescaling: {0}")]
    Normalization(String),
}

/// Type of the vertical algebra `span{V, IV, JV, KV}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerticalType {
    #[serde(rename = "abelian_r4")]
    AbelianR4,
    #[serde(rename = "u1_su2")]
    U1Su2,
}

impl VerticalType {
    pub fn label(&self) -> &'static str {
        match self {
            VerticalType::AbelianR4 => "abelian_r4",
            VerticalType::U1Su2 => "u1_su2",
        }
    }
}

/// Whether the identities of the structure theory are asserted (entries in
/// its regime) or merely observed and reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Asserted,
    Observed,
}

/// The quaternionic quadruple of the Euler field and its basic properties.
#[derive(Clone, Debug)]
pub struct EulerField<S: Scalar> {
    /// `V, IV, JV, KV`.
    pub v: [Vector<S>; 4],
    pub norm_sq: S,
    /// Whether the metric was rescaled so that `‖V‖ = 1`.
    pub normalized: bool,
    pub bismut_parallel: bool,
    /// `g(∇^{LC}_X V, Y) + g(X, ∇^{LC}_Y V) = 0`.
    pub killing: bool,
    /// `‖V‖ = ‖IV‖ = ‖JV‖ = ‖KV‖` and the four are mutually orthogonal.
    pub constant_norms: bool,
}

#[derive(Clone, Debug)]
pub struct VerticalInfo<S: Scalar> {
    pub kind: VerticalType,
    /// `a` from `g([IV, JV], KV) = a ‖V‖²`.
    pub a: S,
    /// `−H(IV, JV, KV) / ‖V‖²`.
    pub a_from_h: S,
    /// `{V, IV, JV, KV}` closed under the bracket.
    pub involutive: bool,
    /// `[V, LV] = 0` for all L.
    pub v_central: bool,
    /// `[IV, JV] = a KV` and cyclic.
    pub brackets_ok: bool,
    pub residual: S,
}

/// Orthogonal decomposition of a 2-form relative to the vertical
/// distribution and the horizontal SD/ASD splitting.
#[derive(Clone, Debug)]
pub struct Decomposition<S: Scalar> {
    pub vertical: Form<S>,
    pub mixed: Form<S>,
    pub sd: Form<S>,
    pub asd: Form<S>,
    /// Coefficients of the SD part on `ω_I^T, ω_J^T, ω_K^T`.
    pub sd_coeffs: [S; 3],
}

impl<S: Scalar> Decomposition<S> {
    pub fn horizontal(&self) -> Form<S> {
        self.sd.add(&self.asd)
    }
}

#[derive(Clone, Debug)]
pub struct BetaEta<S: Scalar> {
    /// `b = −2λ_I`, where `β_I` has SD part `λ_I ω_I^T`.
    pub b: S,
    pub beta: [Form<S>; 3],
    pub eta: [Form<S>; 3],
    /// SD coefficients `λ_L` of `β_L` along `ω_L^T`.
    pub lambda: [S; 3],
    /// `b_{LM}` with `L_{LV} ω_M^T = b_{LM} ω_N^T` (horizontal SD part), for
    /// `(L, M) ∈ {IJ, IK, JK, JI, KI, KJ}`.
    pub b_lm: [(String, S); 6],
    pub checks: Vec<Check<S>>,
}

#[derive(Clone, Debug)]
pub struct Balance<S: Scalar> {
    pub dv_norm_sq: S,
    pub eta_norm_sq: [S; 3],
    /// `−½(‖dV♭‖² + Σ‖η_L‖²) + 3/2`.
    pub residual: S,
    pub checks: Vec<Check<S>>,
}

#[derive(Clone, Debug)]
pub struct Einstein<S: Scalar> {
    pub rho_chern: Form<S>,
    pub lambda: Option<S>,
    pub checks: Vec<Check<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceFlags {
    pub bismut_parallel_torsion: bool,
    pub lc_vertical_all: bool,
    pub lc_vertical_some: bool,
    pub eta_zero_all: bool,
    pub eta_zero_some: bool,
    pub consistent: bool,
}

impl EquivalenceFlags {
    pub fn values(&self) -> [bool; 5] {
        [
            self.bismut_parallel_torsion,
            self.lc_vertical_all,
            self.lc_vertical_some,
            self.eta_zero_all,
            self.eta_zero_some,
        ]
    }
}

/// Everything computed by [`Structure8::report`].
#[derive(Clone, Debug)]
pub struct Structure8Report<S: Scalar> {
    pub regime: Regime,
    /// Metric rescaling factor applied to reach `‖V‖ = 1`.
    pub scale: S,
    pub v: [Vector<S>; 4],
    pub a: S,
    pub b: S,
    pub dv_flat: Form<S>,
    pub omega_t: [Form<S>; 3],
    pub beta: [Form<S>; 3],
    pub eta: [Form<S>; 3],
    pub lambda: [S; 3],
    pub b_lm: [(String, S); 6],
    pub vertical_type: VerticalType,
    pub equivalence_flags: EquivalenceFlags,
    pub balance_residual: S,
    pub einstein_lambda: Option<S>,
    pub appendix_residuals: [S; 7],
    /// `‖H‖² / 6`, the dilaton constant of the constant-`f` specialisation.
    pub dilaton_constant: S,
    pub checks: Vec<Check<S>>,
}

/// Precomputed data of a qualifying entry.
#[derive(Clone, Debug)]
pub struct Structure8<S: Scalar> {
    /// The structure actually analysed (metric possibly rescaled).
    pub q: HyperHermitianData<S>,
    /// Factor `c` with analysed metric `c·g`.
    pub scale: S,
    pub regime: Regime,
    pub h: Form<S>,
    pub theta: Form<S>,
    pub theta_trace: Form<S>,
    pub euler: EulerField<S>,
    /// `V♭, (IV)♭, (JV)♭, (KV)♭`.
    pub vflat: [Form<S>; 4],
    pub omegas: [Form<S>; 3],
    pub omega_t: [Form<S>; 3],
    pub bismut: Connection<S>,
    pub lc: Connection<S>,
    pub chern: Connection<S>,
    pub obata: Connection<S>,
    pub r_b: CurvatureTensor<S>,
    pub r_lc: CurvatureTensor<S>,
    pub r_ob: CurvatureTensor<S>,
    /// Orthogonal projection onto the vertical span.
    pub p_v: Mat<S>,
    pub p_h: Mat<S>,
    /// Adapted horizontal frame `ξ, Iξ, Jξ, Kξ`.
    pub frame: [Vector<S>; 4],
}

fn flat<S: Scalar>(g: &Metric<S>, v: &[S]) -> Form<S> {
    g.flat_form(v)
}

/// Lie derivative of an invariant form along an invariant field (Cartan).
pub fn lie_derivative<S: Scalar>(alg: &crate::liealg::LieAlgebra<S>, x: &[S], a: &Form<S>) -> Form<S> {
    let inner = alg.d(a).interior(x);
    if a.degree() == 0 {
        inner
    } else {
        inner.add(&alg.d(&a.interior(x)))
    }
}

/// `∇_u a` for an arbitrary direction `u`.
pub fn nabla_along<S: Scalar>(conn: &Connection<S>, u: &[S], a: &Form<S>) -> Form<S> {
    a.derivation(&conn.gamma_of(u)).neg()
}

fn form_residual<S: Scalar>(a: &Form<S>, b: &Form<S>) -> S {
    residual(a.sub(b).coeffs())
}

fn complex_residual<S: Scalar>(a: &ComplexForm<S>, b: &ComplexForm<S>) -> S {
    let d = a.sub(b);
    residual(d.re.coeffs().iter().chain(d.im.coeffs()))
}

fn outer_projector<S: Scalar>(g: &Metric<S>, vs: &[Vector<S>], norm_sq: &S) -> Mat<S> {
    let n = g.dim();
    let flats: Vec<Vector<S>> = vs.iter().map(|u| g.flat(u)).collect();
    Mat::from_fn(n, n, |r, c| {
        let mut acc = S::zero();
        for (u, uf) in vs.iter().zip(&flats) {
            acc = acc + u[r].clone() * uf[c].clone();
        }
        acc / norm_sq.clone()
    })
}

impl<S: Scalar> Structure8<S> {
    /// Validates the preconditions (dimension 8, strong HKT, θ ≠ 0, V
    /// Bismut-parallel), optionally rescales the metric so that `‖V‖ = 1`,
    /// and precomputes connections and curvatures.
    pub fn new(q: &HyperHermitianData<S>, normalize: bool, regime: Regime) -> Result<Self, Structure8Error> {
        let n = q.dim();
        if n != 8 {
            return Err(Structure8Error::Dimension(n));
        }
        let hk = is_hkt(q)?;
        if !hk.hkt {
            return Err(Structure8Error::NotHkt);
        }
        if !q.algebra.d(hk.h()).is_zero() {
            return Err(Structure8Error::NotStrong);
        }
        if hk.theta().is_zero() {
            return Err(Structure8Error::HyperKahler);
        }
        let v = euler_vector(&q.g, &hk.lee_trace[0]);
        let norm_sq = q.g.inner(&v, &v);
        if normalize && !norm_sq.is_one() {
            let rescaled = q.with_metric(q.g.scaled(&norm_sq));
            let mut s = Structure8::new(&rescaled, false, regime)?;
            if !s.euler.norm_sq.is_one() {
                return Err(Structure8Error::Normalization(format!("{}", s.euler.norm_sq)));
            }
            s.scale = norm_sq;
            s.euler.normalized = true;
            return Ok(s);
        }
        Structure8::build(q, regime, hk.h().clone(), hk.lee[0].clone(), hk.lee_trace[0].clone())
    }

    fn build(
        q: &HyperHermitianData<S>,
        regime: Regime,
        h: Form<S>,
        theta: Form<S>,
        theta_trace: Form<S>,
    ) -> Result<Self, Structure8Error> {
        let g = &q.g;
        let v0 = euler_vector(g, &theta_trace);
        let v = [v0.clone(), q.i.apply(&v0), q.j.apply(&v0), q.k.apply(&v0)];
        let norm_sq = g.inner(&v0, &v0);
        let herm = q.hermitian(0);
        let bismut = bismut_connection(&herm);
        if !bismut.is_parallel_vector(&v0) {
            return Err(Structure8Error::NotBismutParallel);
        }
        let lc = levi_civita(&q.algebra, g);
        let chern = chern_connection(&herm);
        let obata = obata_connection(q)?;
        let killing = {
            let n = q.dim();
            let dv = lc.derivative_of_vector(&v0);
            (0..n).all(|x| (0..n).all(|y| (g.inner(&dv[x], &basis(n, y)) + g.inner(&basis(n, x), &dv[y])).is_zero()))
        };
        let constant_norms = (0..4).all(|p| {
            (0..4).all(|r| {
                let ip = g.inner(&v[p], &v[r]);
                if p == r {
                    ip.approx_eq(&norm_sq)
                } else {
                    ip.is_zero()
                }
            })
        });
        let vflat = [flat(g, &v[0]), flat(g, &v[1]), flat(g, &v[2]), flat(g, &v[3])];
        let p_v = outer_projector(g, &v, &norm_sq);
        let p_h = Mat::identity(q.dim()).sub(&p_v);
        let omegas = q.omegas();
        let omega_t = [omegas[0].pullback(&p_h), omegas[1].pullback(&p_h), omegas[2].pullback(&p_h)];
        let r_b = curvature(&bismut, &q.algebra, g);
        let r_lc = curvature(&lc, &q.algebra, g);
        let r_ob = curvature(&obata, &q.algebra, g);
        let xi = (0..q.dim())
            .map(|x| p_h.column(x))
            .find(|c| !vis_zero(c))
            .expect("horizontal distribution is non-trivial");
        let frame = [xi.clone(), q.i.apply(&xi), q.j.apply(&xi), q.k.apply(&xi)];
        Ok(Structure8 {
            q: q.clone(),
            scale: S::one(),
            regime,
            h,
            theta,
            theta_trace,
            euler: EulerField {
                v,
                norm_sq,
                normalized: false,
                bismut_parallel: true,
                killing,
                constant_norms,
            },
            vflat,
            omegas,
            omega_t,
            bismut,
            lc,
            chern,
            obata,
            r_b,
            r_lc,
            r_ob,
            p_v,
            p_h,
            frame,
        })
    }

    fn asserting(&self) -> bool {
        self.regime == Regime::Asserted
    }

    fn structures(&self) -> [&Endomorphism<S>; 3] {
        self.q.structures()
    }

    fn n(&self) -> usize {
        self.q.dim()
    }

    /// `dV♭`.
    pub fn dv_flat(&self) -> Form<S> {
        self.q.algebra.d(&self.vflat[0])
    }

    // ---------------------------------------------------------------------
    // Euler field and vertical algebra
    // ---------------------------------------------------------------------

    pub fn euler_field(&self) -> &EulerField<S> {
        &self.euler
    }

    pub fn vertical_type(&self) -> VerticalInfo<S> {
        let alg = &self.q.algebra;
        let g = &self.q.g;
        let v = &self.euler.v;
        let nsq = &self.euler.norm_sq;
        let a = g.inner(&alg.bracket(&v[1], &v[2]), &v[3]) / nsq.clone();
        let a_from_h = -(self.h.eval_vectors(&[&v[1], &v[2], &v[3]])) / nsq.clone();
        let mut span = Span::new(self.n());
        for u in v.iter() {
            span.insert(u);
        }
        let mut involutive = true;
        let mut res: Vec<S> = Vec::new();
        for p in 0..4 {
            for r in (p + 1)..4 {
                let b = alg.bracket(&v[p], &v[r]);
                involutive &= span.contains(&b);
                if p == 0 {
                    res.extend(b.iter().cloned());
                }
            }
        }
        let v_central = res.iter().all(|x| x.is_zero());
        let mut brackets = Vec::new();
        for (x, y, z) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
            let b = alg.bracket(&v[x], &v[y]);
            for (bi, zi) in b.iter().zip(&v[z]) {
                brackets.push(bi.clone() - a.clone() * zi.clone());
            }
        }
        let brackets_ok = brackets.iter().all(|x| x.is_zero()) && a.approx_eq(&a_from_h);
        res.extend(brackets);
        res.push(a.clone() - a_from_h.clone());
        VerticalInfo {
            kind: if a.is_zero() { VerticalType::AbelianR4 } else { VerticalType::U1Su2 },
            a,
            a_from_h,
            involutive,
            v_central,
            brackets_ok,
            residual: residual(res.iter()),
        }
    }

    // ---------------------------------------------------------------------
    // Horizontal decomposition
    // ---------------------------------------------------------------------

    pub fn horizontal_decompose(&self, a: &Form<S>) -> Decomposition<S> {
        assert_eq!(a.degree(), 2, "decomposition is defined on 2-forms");
        let g = &self.q.g;
        let vertical = a.pullback(&self.p_v);
        let hor = a.pullback(&self.p_h);
        let mixed = a.sub(&vertical).sub(&hor);
        let mut sd = Form::zero(self.n(), 2);
        let mut coeffs = Vec::with_capacity(3);
        for w in &self.omega_t {
            let c = hor.inner(g, w) / w.norm_sq(g);
            sd = sd.add(&w.scale(&c));
            coeffs.push(c);
        }
        let asd = hor.sub(&sd);
        Decomposition {
            vertical,
            mixed,
            sd,
            asd,
            sd_coeffs: coeffs.try_into().expect("three coefficients"),
        }
    }

    /// Whether a 2-form is horizontal and anti-self-dual.
    pub fn is_horizontal_asd(&self, a: &Form<S>) -> bool {
        let d = self.horizontal_decompose(a);
        d.vertical.is_zero() && d.mixed.is_zero() && d.sd.is_zero()
    }

    // ---------------------------------------------------------------------
    // β, η and b
    // ---------------------------------------------------------------------

    pub fn beta_eta_extract(&self) -> BetaEta<S> {
        let alg = &self.q.algebra;
        let asrt = self.asserting();
        let vi = self.vertical_type();
        let a = vi.a.clone();
        let nsq = self.euler.norm_sq.clone();
        let mut checks = Vec::new();
        let ls = self.structures();
        let dl: Vec<Form<S>> = (1..4).map(|p| alg.d(&self.vflat[p])).collect();
        let decs: Vec<Decomposition<S>> = dl.iter().map(|f| self.horizontal_decompose(f)).collect();
        let beta: Vec<Form<S>> = decs.iter().map(|d| d.horizontal()).collect();
        let lambda: Vec<S> = (0..3).map(|l| decs[l].sd_coeffs[l].clone()).collect();
        let b = -(S::from_i64(2) * lambda[0].clone());
        let half_b = b.clone() * S::half();
        let eta: Vec<Form<S>> = (0..3).map(|l| beta[l].add(&self.omega_t[l].scale(&half_b))).collect();

        // d(LV♭) = ι_{LV} H
        let diff_res = residual(
            (0..3)
                .flat_map(|l| dl[l].sub(&self.h.interior(&self.euler.v[l + 1])).coeffs().to_vec())
                .collect::<Vec<_>>()
                .iter(),
        );
        checks.push(Check::zero("structure8.d_lv_flat_eq_iota_lv_h", asrt, diff_res));

        // vertical part of d(IV♭) = −a JV♭∧KV♭/‖V‖² (cyclic), no mixed part
        let mut vres = Vec::new();
        for (l, (p, r)) in [(2usize, 3usize), (3, 1), (1, 2)].iter().enumerate() {
            let expect = self.vflat[*p].wedge(&self.vflat[*r]).scale(&(-(a.clone()) / nsq.clone()));
            vres.extend(decs[l].vertical.sub(&expect).coeffs().to_vec());
            vres.extend(decs[l].mixed.coeffs().to_vec());
        }
        checks.push(Check::zero("structure8.d_lv_flat_vertical_part", asrt, residual(vres.iter())));

        // λ_I = λ_J = λ_K and no off-diagonal SD components
        let mut sres = Vec::new();
        for l in 0..3 {
            sres.push(lambda[l].clone() - lambda[0].clone());
            for m in 0..3 {
                if m != l {
                    sres.push(decs[l].sd_coeffs[m].clone());
                }
            }
        }
        checks.push(Check::zero("structure8.beta_sd_part_is_lambda_omega_t", asrt, residual(sres.iter())));

        // a + b = −2
        let ab = a.clone() + b.clone() + S::from_i64(2);
        checks.push(Check::zero("structure8.a_plus_b_eq_minus_2", asrt, ab));
        // b(b − a) = 0
        checks.push(Check::zero("structure8.b_times_b_minus_a", asrt, b.clone() * (b.clone() - a.clone())));

        // η_L horizontal ASD, β_L of type (1,1) for L
        let eta_ok = eta.iter().all(|e| self.is_horizontal_asd(e));
        checks.push(Check::with_mode("structure8.eta_horizontal_asd", asrt, eta_ok, None));
        let beta11 = (0..3).all(|l| invariance_check(&dl[l], &[ls[l]]));
        checks.push(Check::with_mode("structure8.d_lv_flat_type_11", asrt, beta11, None));
        let wt_sd = self
            .omega_t
            .iter()
            .all(|w| self.horizontal_decompose(w).asd.is_zero());
        checks.push(Check::with_mode("structure8.omega_t_horizontal_sd", asrt, wt_sd, None));

        // dη_I = −η_J∧KV♭ + η_K∧JV♭ (cyclic)
        let vf = &self.vflat;
        let mut dres = Vec::new();
        for (l, m, nn) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
            let lhs = alg.d(&eta[l]);
            let rhs = eta[m].wedge(&vf[nn + 1]).neg().add(&eta[nn].wedge(&vf[m + 1]));
            dres.extend(lhs.sub(&rhs).coeffs().to_vec());
        }
        checks.push(Check::zero("structure8.d_eta", asrt, residual(dres.iter())));

        // dω_I^T = b KV♭∧ω_J^T − b JV♭∧ω_K^T (cyclic)
        let wt = &self.omega_t;
        let mut ores = Vec::new();
        for (l, m, nn) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
            let lhs = alg.d(&wt[l]);
            let rhs = vf[nn + 1]
                .wedge(&wt[m])
                .scale(&b)
                .sub(&vf[m + 1].wedge(&wt[nn]).scale(&b));
            ores.extend(lhs.sub(&rhs).coeffs().to_vec());
        }
        checks.push(Check::zero("structure8.d_omega_t", asrt, residual(ores.iter())));

        // b_{LM}: L_{LV} ω_M^T = b_{LM} ω_N^T on the horizontal SD part
        let names = ["I", "J", "K"];
        let mut b_lm = Vec::new();
        let mut bl_res = Vec::new();
        for (l, m, nn, cyclic) in [
            (0usize, 1usize, 2usize, true),
            (0, 2, 1, false),
            (1, 2, 0, true),
            (1, 0, 2, false),
            (2, 0, 1, true),
            (2, 1, 0, false),
        ] {
            let lie = lie_derivative(alg, &self.euler.v[l + 1], &wt[m]);
            let c = self.horizontal_decompose(&lie).sd_coeffs[nn].clone();
            let expect = if cyclic { b.clone() } else { -b.clone() };
            bl_res.push(c.clone() - expect);
            b_lm.push((format!("b_{}{}", names[l], names[m]), c));
        }
        checks.push(Check::zero("structure8.b_lm_equal_plus_minus_b", false, residual(bl_res.iter())));

        let arr = |v: Vec<Form<S>>| -> [Form<S>; 3] { v.try_into().expect("three forms") };
        BetaEta {
            b,
            beta: arr(beta),
            eta: arr(eta),
            lambda: lambda.try_into().expect("three coefficients"),
            b_lm: b_lm.try_into().expect("six coefficients"),
            checks,
        }
    }

    // ---------------------------------------------------------------------
    // Balance and torsion reconstruction
    // ---------------------------------------------------------------------

    pub fn balance_check(&self, be: &BetaEta<S>) -> Balance<S> {
        let g = &self.q.g;
        let asrt = self.asserting();
        let dv = self.dv_flat();
        let dv_norm_sq = dv.norm_sq(g);
        let eta_norm_sq: Vec<S> = be.eta.iter().map(|e| e.norm_sq(g)).collect();
        let sum = eta_norm_sq.iter().fold(dv_norm_sq.clone(), |acc, x| acc + x.clone());
        let res = -(S::half() * sum) + S::from_ratio(3, 2);
        let mut checks = vec![Check::zero("structure8.balance_dh", asrt, res.clone())];

        // ‖β_L‖² = b² + ‖η_L‖²
        let bsq = be.b.clone() * be.b.clone();
        let nres: Vec<S> = (0..3)
            .map(|l| be.beta[l].norm_sq(g) - bsq.clone() - eta_norm_sq[l].clone())
            .collect();
        checks.push(Check::zero("structure8.beta_norm", asrt, residual(nres.iter())));

        // H = V♭∧dV♭ − a IV♭∧JV♭∧KV♭ + Σ LV♭∧β_L
        let a = self.vertical_type().a;
        let vf = &self.vflat;
        let mut rec = vf[0].wedge(&dv);
        rec = rec.sub(&vf[1].wedge(&vf[2]).wedge(&vf[3]).scale(&a));
        for l in 0..3 {
            rec = rec.add(&vf[l + 1].wedge(&be.beta[l]));
        }
        checks.push(Check::zero("structure8.torsion_reconstruction", asrt, form_residual(&rec, &self.h)));
        Balance {
            dv_norm_sq,
            eta_norm_sq: eta_norm_sq.try_into().expect("three norms"),
            residual: res,
            checks,
        }
    }

    // ---------------------------------------------------------------------
    // Rotational identities
    // ---------------------------------------------------------------------

    pub fn rotational_check(&self) -> Vec<Check<S>> {
        let alg = &self.q.algebra;
        let asrt = self.asserting();
        let v = &self.euler.v;
        let w = &self.omegas;
        let mut out = Vec::new();
        let lv: Vec<S> = (0..3)
            .flat_map(|l| lie_derivative(alg, &v[0], &w[l]).coeffs().to_vec())
            .collect();
        out.push(Check::zero("structure8.lie_v_omega", asrt, residual(lv.iter())));
        let diag: Vec<S> = (0..3)
            .flat_map(|l| lie_derivative(alg, &v[l + 1], &w[l]).coeffs().to_vec())
            .collect();
        out.push(Check::zero("structure8.lie_lv_omega_l", asrt, residual(diag.iter())));
        for (l, m, nn, id) in [
            (0usize, 1usize, 2usize, "structure8.lie_iv_omega_j"),
            (1, 2, 0, "structure8.lie_jv_omega_k"),
            (2, 0, 1, "structure8.lie_kv_omega_i"),
        ] {
            let lie = lie_derivative(alg, &v[l + 1], &w[m]);
            out.push(Check::zero(id, asrt, form_residual(&lie, &w[nn].neg())));
        }
        let lie = lie_derivative(alg, &v[1], &w[2]);
        out.push(Check::zero("structure8.lie_iv_omega_k", asrt, form_residual(&lie, &w[1])));
        out
    }

    // ---------------------------------------------------------------------
    // Obata connection and the Euler field
    // ---------------------------------------------------------------------

    pub fn obata_euler_check(&self) -> Vec<Check<S>> {
        let asrt = self.asserting();
        let n = self.n();
        let v = &self.euler.v;
        let half = S::half();
        let ls = self.structures();
        let mut out = Vec::new();
        let mut res = Vec::new();
        for x in 0..n {
            let dv = self.obata.gamma(x).apply(&v[0]);
            let ex = basis::<S>(n, x);
            for (a, b) in dv.iter().zip(&ex) {
                res.push(a.clone() - half.clone() * b.clone());
            }
        }
        out.push(Check::zero("structure8.obata_v_half_identity", asrt, residual(res.iter())));
        let mut res = Vec::new();
        for (l, lm) in ls.iter().enumerate() {
            for x in 0..n {
                let dv = self.obata.gamma(x).apply(&v[l + 1]);
                let lx = lm.column(x);
                for (a, b) in dv.iter().zip(&lx) {
                    res.push(a.clone() - half.clone() * b.clone());
                }
            }
        }
        out.push(Check::zero("structure8.obata_lv_half_l", asrt, residual(res.iter())));

        // R^{Ob}(X,Y)Z = 0 whenever X, Y or Z is vertical
        let mut res = Vec::new();
        for u in v.iter() {
            for y in 0..n {
                let ey = basis::<S>(n, y);
                res.extend(self.r_ob.op_of(u, &ey).entries().to_vec());
            }
            for x in 0..n {
                for y in (x + 1)..n {
                    res.extend(self.r_ob.op(x, y).apply(u));
                }
            }
        }
        out.push(Check::zero("structure8.obata_curvature_vertical", asrt, residual(res.iter())));

        // totally geodesic vertical leaves
        let g = &self.q.g;
        let mut res = Vec::new();
        for uu in v.iter() {
            for w in v.iter() {
                let d = self.lc.apply(uu, w);
                for x in &self.frame {
                    res.push(g.inner(&d, x));
                }
            }
        }
        out.push(Check::zero("structure8.vertical_totally_geodesic", asrt, residual(res.iter())));
        out
    }

    // ---------------------------------------------------------------------
    // HKT-Einstein
    // ---------------------------------------------------------------------

    pub fn hkt_einstein_check(&self) -> Einstein<S> {
        let asrt = self.asserting();
        let g = &self.q.g;
        let alg = &self.q.algebra;
        let r_c = curvature(&self.chern, alg, g);
        let rho = ricci_traces(&r_c, g, Some(&self.q.i)).rho.expect("complex structure supplied");
        let rho_b = ricci_traces(&self.r_b, g, Some(&self.q.i)).rho.expect("complex structure supplied");
        let mut checks = Vec::new();
        // ρ^C_I = d(Iθ_tr) = 2 d(IV♭) when ρ^B = 0
        if rho_b.is_zero() {
            let expect = alg.d(&self.theta_trace.j_act(&self.q.i));
            checks.push(Check::zero("structure8.rho_chern_eq_d_i_theta", asrt, form_residual(&rho, &expect)));
            let expect2 = alg.d(&self.vflat[1]).scale(&S::from_i64(2));
            checks.push(Check::zero("structure8.rho_chern_eq_2_d_iv_flat", asrt, form_residual(&rho, &expect2)));
        } else {
            checks.push(Check::skipped("structure8.rho_chern_eq_d_i_theta", "Bismut Ricci form non-zero"));
        }
        let m = rho.sub(&rho.pullback(&self.q.j)).scale(&S::half());
        let wi = &self.omegas[0];
        let lam = m.inner(g, wi) / wi.norm_sq(g);
        let prop_res = form_residual(&m, &wi.scale(&lam));
        let proportional = prop_res.is_zero();
        checks.push(Check::zero("structure8.einstein_proportional", asrt, prop_res));
        checks.push(Check::zero(
            "structure8.einstein_lambda_eq_1",
            asrt && self.euler.norm_sq.is_one(),
            lam.clone() - S::one(),
        ));
        Einstein {
            rho_chern: rho,
            lambda: if proportional { Some(lam) } else { None },
            checks,
        }
    }

    // ---------------------------------------------------------------------
    // Curvature components
    // ---------------------------------------------------------------------

    /// Residuals of the seven curvature-component identities, evaluated on
    /// the adapted horizontal frame for every `L`.
    pub fn appendix_identities(&self, be: &BetaEta<S>) -> [S; 7] {
        let g = &self.q.g;
        let v = &self.euler.v;
        let e = &self.frame;
        let rb = self.r_b.lowered();
        let rl = self.r_lc.lowered();
        let dv = self.dv_flat();
        let quarter = S::from_ratio(1, 4);
        let half = S::half();
        let mut items: [Vec<S>; 7] = Default::default();
        for l in 0..3 {
            let lv = &v[l + 1];
            let eta = &be.eta[l];
            let nabla_eta: Vec<Form<S>> = e.iter().map(|x| nabla_along(&self.lc, x, eta)).collect();
            for i in 0..4 {
                for j in 0..4 {
                    let lhs = rb.eval_vectors(&[&v[0], lv, &e[i], &e[j]]);
                    let si = g.sharp(eta.interior(&e[i]).coeffs());
                    let sj = g.sharp(eta.interior(&e[j]).coeffs());
                    let rhs = dv.eval_vectors(&[&si, &e[j]]) + dv.eval_vectors(&[&e[i], &sj]);
                    items[0].push(lhs.clone() - rhs);
                    let lc = rl.eval_vectors(&[&v[0], lv, &e[i], &e[j]]);
                    items[3].push(lc - quarter.clone() * lhs);
                    for k in 0..4 {
                        let rb3 = rb.eval_vectors(&[lv, &e[i], &e[j], &e[k]]);
                        let rhs3 = -nabla_eta[i].eval_vectors(&[&e[j], &e[k]]);
                        items[2].push(rb3.clone() - rhs3);
                        let rl6 = rl.eval_vectors(&[lv, &e[i], &e[j], &e[k]]);
                        items[5].push(rl6 - half.clone() * rb3);
                    }
                }
                for u in v.iter() {
                    items[6].push(rl.eval_vectors(&[&v[0], lv, u, &e[i]]));
                }
            }
        }
        let nabla_dv: Vec<Form<S>> = e.iter().map(|x| nabla_along(&self.lc, x, &dv)).collect();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let rb2 = rb.eval_vectors(&[&v[0], &e[i], &e[j], &e[k]]);
                    let rhs = -nabla_dv[i].eval_vectors(&[&e[j], &e[k]]);
                    items[1].push(rb2.clone() - rhs);
                    let rl5 = rl.eval_vectors(&[&v[0], &e[i], &e[j], &e[k]]);
                    items[4].push(rl5 - half.clone() * rb2);
                }
            }
        }
        let out: Vec<S> = items.iter().map(|it| residual(it.iter())).collect();
        out.try_into().expect("seven residuals")
    }

    /// Item 4 recomputed through the Levi-Civita/Bismut curvature relation:
    /// residual of that relation on the components `(V, LV, ξ_i, ξ_j)`.
    pub fn appendix_item4_crosscheck(&self) -> S {
        let t = lc_from_bismut_residual(&self.r_lc, &self.r_b, &self.bismut, &self.h, &self.q.g);
        let v = &self.euler.v;
        let mut res = Vec::new();
        for l in 1..4 {
            for x in &self.frame {
                for y in &self.frame {
                    res.push(t.eval_vectors(&[&v[0], &v[l], x, y]));
                }
            }
        }
        residual(res.iter())
    }

    // ---------------------------------------------------------------------
    // Five-way equivalence
    // ---------------------------------------------------------------------

    pub fn equivalence_suite(&self, be: &BetaEta<S>) -> EquivalenceFlags {
        let v = &self.euler.v;
        let rl = self.r_lc.lowered();
        let nabla_h = self.bismut.is_parallel_form(&self.h);
        let per_l: Vec<bool> = (1..4)
            .map(|l| {
                self.frame.iter().all(|x| {
                    self.frame
                        .iter()
                        .all(|y| rl.eval_vectors(&[&v[0], &v[l], x, y]).is_zero())
                })
            })
            .collect();
        let eta_zero: Vec<bool> = be.eta.iter().map(|e| e.is_zero()).collect();
        let vals = [
            nabla_h,
            per_l.iter().all(|x| *x),
            per_l.iter().any(|x| *x),
            eta_zero.iter().all(|x| *x),
            eta_zero.iter().any(|x| *x),
        ];
        EquivalenceFlags {
            bismut_parallel_torsion: vals[0],
            lc_vertical_all: vals[1],
            lc_vertical_some: vals[2],
            eta_zero_all: vals[3],
            eta_zero_some: vals[4],
            consistent: vals.iter().all(|x| *x == vals[0]),
        }
    }

    // ---------------------------------------------------------------------
    // Potential form
    // ---------------------------------------------------------------------

    pub fn potential_form_check(&self) -> Vec<Check<S>> {
        let asrt = self.asserting();
        let alg = &self.q.algebra;
        let i = &self.q.i;
        let v = &self.euler.v;
        let omega = omega_complex(&self.q);
        let mut out = Vec::new();

        // L_{V^{1,0}} Ω = Ω with V^{1,0} = V − iIV
        let minus_iv: Vector<S> = v[1].iter().map(|c| -c.clone()).collect();
        let lie = omega.lie_derivative(alg, &v[0], &minus_iv);
        out.push(Check::zero("structure8.lie_v10_omega", asrt, complex_residual(&lie, &omega)));

        // L_{IV} Ω = iΩ
        let lie_iv = ComplexForm::new(
            lie_derivative(alg, &v[1], &omega.re),
            lie_derivative(alg, &v[1], &omega.im),
        );
        let i_omega = omega.scale(&S::zero(), &S::one());
        out.push(Check::zero("structure8.lie_iv_big_omega", asrt, complex_residual(&lie_iv, &i_omega)));

        // ω_J = d(JV♭) − I d(JV♭)
        let djv = alg.d(&self.vflat[2]);
        let rhs = djv.sub(&djv.pullback(i));
        out.push(Check::zero("structure8.omega_j_potential", asrt, form_residual(&self.omegas[1], &rhs)));

        // Ω = ∂_I(2 (JV♭)^{1,0}); here (1,0)-parts are unhalved, matching
        // V^{1,0} = V − iIV and (V♭)^{1,0} = V♭ + iIV♭: β^{1,0} = β − iβ∘I
        let jv10 = one_zero_part(&self.vflat[2], i).scale_real(&S::from_i64(4));
        let del = jv10.del(alg, i, 1, 0);
        out.push(Check::zero("structure8.omega_del_exact", asrt, complex_residual(&del, &omega)));

        // (V♭)^{1,0} = V♭ + i IV♭ is of type (1,0) and ∂_I-closed
        let v10 = ComplexForm::new(self.vflat[0].clone(), self.vflat[1].clone());
        let is10 = v10.is_type_k0(i);
        let dclosed = v10.del(alg, i, 1, 0);
        out.push(Check::with_mode(
            "structure8.v_flat_10_del_closed",
            asrt,
            is10 && dclosed.is_zero(),
            Some(residual(dclosed.re.coeffs().iter().chain(dclosed.im.coeffs()))),
        ));
        out
    }

    // ---------------------------------------------------------------------
    // Remaining structural identities
    // ---------------------------------------------------------------------

    pub fn remark_checks(&self) -> Vec<Check<S>> {
        let asrt = self.asserting();
        let alg = &self.q.algebra;
        let v = &self.euler.v;
        let dv = self.dv_flat();
        let mut out = Vec::new();
        out.push(Check::with_mode(
            "structure8.euler_bismut_parallel",
            asrt,
            self.euler.bismut_parallel,
            None,
        ));
        out.push(Check::with_mode("structure8.euler_killing", asrt, self.euler.killing, None));
        out.push(Check::with_mode(
            "structure8.euler_quadruple_orthogonal",
            asrt,
            self.euler.constant_norms,
            None,
        ));
        let res: Vec<S> = v.iter().flat_map(|w| dv.interior(w).coeffs().to_vec()).collect();
        out.push(Check::zero("structure8.iota_vertical_dv_flat", asrt, residual(res.iter())));
        let mut res = Vec::new();
        for l in 1..4 {
            let d = alg.d(&self.vflat[l]);
            res.extend(d.interior(&v[0]).coeffs().to_vec());
            res.extend(d.interior(&v[l]).coeffs().to_vec());
        }
        out.push(Check::zero("structure8.iota_v_d_lv_flat", asrt, residual(res.iter())));
        let inv = invariance_check(&dv, &self.structures());
        out.push(Check::with_mode("structure8.dv_flat_su2_invariant", asrt, inv, None));
        let dec = self.horizontal_decompose(&dv);
        let asd = dec.vertical.is_zero() && dec.mixed.is_zero() && dec.sd.is_zero();
        out.push(Check::with_mode("structure8.dv_flat_horizontal_asd", asrt, asd, None));
        // θ_tr = 2V♭/‖V‖²·‖V‖² and θ = −2V♭
        let two_v = self.vflat[0].scale(&S::from_i64(2));
        out.push(Check::zero(
            "structure8.theta_trace_eq_2v_flat",
            asrt,
            form_residual(&self.theta_trace, &two_v),
        ));
        out.push(Check::zero(
            "structure8.theta_eq_minus_2v_flat",
            asrt,
            form_residual(&self.theta, &two_v.neg()),
        ));
        // vertical decomposition of ω_I
        let wd = self.horizontal_decompose(&self.omegas[0]);
        let nsq = self.euler.norm_sq.clone();
        let expect = self.vflat[0]
            .wedge(&self.vflat[1])
            .add(&self.vflat[2].wedge(&self.vflat[3]))
            .scale(&(S::one() / nsq));
        let ok = wd.vertical.approx_eq(&expect) && wd.mixed.is_zero() && wd.asd.is_zero();
        out.push(Check::with_mode("structure8.omega_i_decomposition", asrt, ok, None));
        out
    }

    // ---------------------------------------------------------------------
    // Full report
    // ---------------------------------------------------------------------

    pub fn report(&self) -> Structure8Report<S> {
        let asrt = self.asserting();
        let g = &self.q.g;
        let vi = self.vertical_type();
        let mut checks = Vec::new();
        checks.push(Check::with_mode("structure8.vertical_involutive", asrt, vi.involutive, None));
        checks.push(Check::with_mode("structure8.v_central_in_vertical", asrt, vi.v_central, None));
        checks.push(Check::zero("structure8.vertical_brackets", asrt, vi.residual.clone()));
        checks.push(Check::with_mode(
            "structure8.vertical_type_u1_su2",
            asrt,
            vi.kind == VerticalType::U1Su2,
            None,
        ));
        checks.extend(self.remark_checks());
        let be = self.beta_eta_extract();
        checks.extend(be.checks.iter().cloned());
        let bal = self.balance_check(&be);
        checks.extend(bal.checks.iter().cloned());
        checks.extend(self.rotational_check());
        checks.extend(self.obata_euler_check());
        let ein = self.hkt_einstein_check();
        checks.extend(ein.checks.iter().cloned());
        let app = self.appendix_identities(&be);
        for (k, r) in app.iter().enumerate() {
            checks.push(Check::zero(format!("structure8.appendix_item{}", k + 1), asrt, r.clone()));
        }
        checks.push(Check::zero(
            "structure8.appendix_item4_crosscheck",
            asrt,
            self.appendix_item4_crosscheck(),
        ));
        let eq = self.equivalence_suite(&be);
        checks.push(Check::with_mode("structure8.equivalence_consistent", asrt, eq.consistent, None));
        checks.extend(self.potential_form_check());
        let hn = self.h.norm_sq(g);
        Structure8Report {
            regime: self.regime,
            scale: self.scale.clone(),
            v: self.euler.v.clone(),
            a: vi.a,
            b: be.b.clone(),
            dv_flat: self.dv_flat(),
            omega_t: self.omega_t.clone(),
            beta: be.beta.clone(),
            eta: be.eta.clone(),
            lambda: be.lambda.clone(),
            b_lm: be.b_lm.clone(),
            vertical_type: vi.kind,
            equivalence_flags: eq,
            balance_residual: bal.residual,
            einstein_lambda: ein.lambda,
            appendix_residuals: app,
            dilaton_constant: hn / S::from_i64(6),
            checks,
        }
    }
}

/// `V = ½ θ_tr^♯`.
pub fn euler_vector<S: Scalar>(g: &Metric<S>, theta_trace: &Form<S>) -> Vector<S> {
    g.sharp(theta_trace.coeffs())
        .into_iter()
        .map(|c| S::half() * c)
        .collect()
}

/// `λ / ‖V‖²` at the given metric (`None` if the Chern–Ricci combination
/// is not proportional to `ω_I`). Under `g ↦ c·g` the constant `λ` scales by
/// `1/c` and `‖V‖²` by `1/c`, so this ratio is scale invariant.
pub fn einstein_scale_invariant<S: Scalar>(q: &HyperHermitianData<S>) -> Result<Option<S>, Structure8Error> {
    let s = Structure8::new(q, false, Regime::Observed)?;
    Ok(s.hkt_einstein_check().lambda.map(|l| l / s.euler.norm_sq.clone()))
}
