//! Property tests for the exterior calculus, the Chevalley–Eilenberg
//! differential, Hermitian connections and curvature.

use proptest::prelude::*;

use hkt::catalog;
use hkt::curvature::{bianchi_check, curvature, holonomy_algebra};
use hkt::hermitian::{gauduchon_connection, levi_civita};
use hkt::linalg::{basis, Mat, Vector};
use hkt::liealg::{su2, LieAlgebra};
use hkt::multilinear::{combinations, hodge_star, rank_of, sort_with_sign, Form, Metric};
use hkt::verify::{endo_residual, metric_residual};
use hkt::{Exact, Scalar};

fn q(v: i64) -> Exact {
    Exact::int(v)
}

fn form_from(n: usize, k: usize, coeffs: &[i64]) -> Form<Exact> {
    Form::from_fn(n, k, |t| q(coeffs[rank_of(t) % coeffs.len()]))
}

/// A form of the given shape with small integer coefficients (about half
/// of them zero).
fn arb_form(n: usize, k: usize) -> impl Strategy<Value = Form<Exact>> {
    let len = combinations(n, k).len().max(1);
    proptest::collection::vec(prop_oneof![Just(0i64), -2i64..=2], len).prop_map(move |c| form_from(n, k, &c))
}

/// A positive-definite metric `MᵀM + I` with small integer `M`.
fn arb_metric(n: usize) -> impl Strategy<Value = Metric<Exact>> {
    proptest::collection::vec(-1i64..=1, n * n).prop_map(move |m| {
        let m = Mat::from_fn(n, n, |i, j| q(m[i * n + j]));
        let g = m.transpose().mul(&m).add(&Mat::identity(n));
        Metric::new(g).expect("positive definite")
    })
}

/// Lie algebras that satisfy Jacobi by construction: almost-abelian
/// `ℝ ⋉_A ℝ^{n−1}`, 2-step nilpotent with a 1-dimensional centre, and
/// `su(2) ⊕ ℝ^{n−3}`.
fn arb_algebra(n: usize) -> impl Strategy<Value = LieAlgebra<Exact>> {
    let m = n - 1;
    let almost_abelian = proptest::collection::vec(-2i64..=2, m * m).prop_map(move |a| {
        let mut list = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if a[i * m + j] != 0 {
                    list.push((0, i + 1, j + 1, q(a[i * m + j])));
                }
            }
        }
        LieAlgebra::from_brackets(n, &list).expect("almost-abelian brackets")
    });
    let pairs = (m * (m - 1)) / 2;
    let nilpotent = proptest::collection::vec(-2i64..=2, pairs).prop_map(move |c| {
        let mut list = Vec::new();
        let mut p = 0;
        for i in 0..m {
            for j in i + 1..m {
                if c[p] != 0 {
                    list.push((i, j, n - 1, q(c[p])));
                }
                p += 1;
            }
        }
        LieAlgebra::from_brackets(n, &list).expect("nilpotent brackets")
    });
    let compact = Just(su2::<Exact>().direct_sum(&LieAlgebra::abelian(n - 3)));
    prop_oneof![almost_abelian, nilpotent, compact]
}

fn sign_of_swap(p: usize, q: usize) -> Exact {
    if (p * q) % 2 == 0 {
        Exact::int(1)
    } else {
        Exact::int(-1)
    }
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn wedge_is_associative(
        (a, b, c) in (2usize..=8).prop_flat_map(|n| (1usize..=2, 0usize..=2, 0usize..=2).prop_flat_map(move |(p, r, s)| {
            (arb_form(n, p), arb_form(n, r), arb_form(n, s))
        }))
    ) {
        prop_assert!(a.wedge(&b).wedge(&c).sub(&a.wedge(&b.wedge(&c))).is_zero());
    }

    #[test]
    fn wedge_is_graded_commutative(
        (a, b) in (2usize..=8).prop_flat_map(|n| (0usize..=4, 0usize..=4).prop_flat_map(move |(p, r)| (arb_form(n, p), arb_form(n, r))))
    ) {
        let (p, r) = (a.degree(), b.degree());
        prop_assert!(a.wedge(&b).sub(&b.wedge(&a).scale(&sign_of_swap(p, r))).is_zero());
    }

    #[test]
    fn interior_is_antiderivation(
        (a, b, v) in (2usize..=6).prop_flat_map(|n| (1usize..=3, 1usize..=3).prop_flat_map(move |(p, r)| {
            (arb_form(n, p), arb_form(n, r), proptest::collection::vec(-2i64..=2, n))
        }))
    ) {
        let v: Vector<Exact> = v.into_iter().map(q).collect();
        let p = a.degree();
        let sign = if p % 2 == 0 { q(1) } else { q(-1) };
        let lhs = a.wedge(&b).interior(&v);
        let rhs = a.interior(&v).wedge(&b).add(&a.wedge(&b.interior(&v)).scale(&sign));
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn evaluation_is_alternating(a in arb_form(6, 3), perm in Just(vec![0usize, 1, 2]).prop_shuffle(), base in proptest::sample::subsequence((0..6).collect::<Vec<_>>(), 3)) {
        let tuple: Vec<usize> = perm.iter().map(|&i| base[i]).collect();
        let mut sorted = tuple.clone();
        let s = sort_with_sign(&mut sorted).expect("distinct indices");
        let v = a.eval_indices(&tuple);
        let w = a.eval_indices(&sorted);
        prop_assert_eq!(v, if s > 0 { w } else { -w });
    }

    #[test]
    fn hodge_star_is_an_isometry_on_two_forms(g in arb_metric(4), a in arb_form(4, 2)) {
        let frame: Vec<Vector<Exact>> = (0..4).map(|i| basis(4, i)).collect();
        let star = hodge_star(&g, &frame, &a).expect("supported");
        prop_assert_eq!(star.norm_sq(&g), a.norm_sq(&g));
        // ⋆⋆ = +1 on 2-forms in dimension 4
        let twice = hodge_star(&g, &frame, &star).expect("supported");
        prop_assert!(twice.sub(&a).is_zero());
    }

    #[test]
    fn hodge_star_isometry_all_degrees_up_to_factorials(g in arb_metric(4), k in 0usize..=4, c in proptest::collection::vec(-2i64..=2, 6)) {
        // With full-sum norms ‖a‖² = k!·|a|², so |⋆a|² = |a|² reads
        // ‖⋆a‖²·k! = ‖a‖²·(4−k)!.
        let a = form_from(4, k, &c);
        let frame: Vec<Vector<Exact>> = (0..4).map(|i| basis(4, i)).collect();
        let star = hodge_star(&g, &frame, &a).expect("supported");
        let fact = |m: usize| Exact::int((1..=m as i64).product::<i64>().max(1));
        prop_assert_eq!(star.norm_sq(&g) * fact(k), a.norm_sq(&g) * fact(4 - k));
    }

    #[test]
    fn norm_matches_brute_force_sum(g in arb_metric(4), (k, c) in (1usize..=3).prop_flat_map(|k| (Just(k), proptest::collection::vec(-2i64..=2, 6)))) {
        let a = form_from(4, k, &c);
        let n: usize = 4;
        let ginv = g.inverse();
        let tuples: Vec<Vec<usize>> = (0..n.pow(k as u32))
            .map(|mut t| (0..k).map(|_| { let d = t % n; t /= n; d }).collect())
            .collect();
        let mut sum = Exact::int(0);
        for i in &tuples {
            let ai = a.eval_indices(i);
            if ai.is_zero() { continue; }
            for j in &tuples {
                let aj = a.eval_indices(j);
                if aj.is_zero() { continue; }
                let w = i.iter().zip(j).fold(Exact::int(1), |acc, (&x, &y)| acc * ginv.get(x, y).clone());
                sum = sum + ai.clone() * aj * w;
            }
        }
        prop_assert_eq!(a.norm_sq(&g), sum);
    }

    #[test]
    fn d_squared_vanishes((alg, a) in (3usize..=6).prop_flat_map(|n| (arb_algebra(n), (0usize..=4).prop_flat_map(move |k| arb_form(n, k))))) {
        prop_assert!(alg.jacobi_check());
        prop_assert!(alg.d(&alg.d(&a)).is_zero());
    }

    #[test]
    fn d_satisfies_leibniz((alg, a, b) in (3usize..=6).prop_flat_map(|n| (arb_algebra(n), (0usize..=2).prop_flat_map(move |k| arb_form(n, k)), (0usize..=2).prop_flat_map(move |k| arb_form(n, k))))) {
        let sign = if a.degree() % 2 == 0 { q(1) } else { q(-1) };
        let lhs = alg.d(&a.wedge(&b));
        let rhs = alg.d(&a).wedge(&b).add(&a.wedge(&alg.d(&b)).scale(&sign));
        prop_assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn direct_sum_preserves_jacobi_and_unimodularity(a in (3usize..=4).prop_flat_map(arb_algebra), b in (3usize..=4).prop_flat_map(arb_algebra)) {
        let s = a.direct_sum(&b);
        prop_assert!(s.jacobi_check());
        let (fa, fb, fs) = (a.classify(), b.classify(), s.classify());
        prop_assert_eq!(fs.unimodular, fa.unimodular && fb.unimodular);
    }

    #[test]
    fn levi_civita_curvature_symmetries_and_bianchi((alg, g) in (3usize..=5).prop_flat_map(|n| (arb_algebra(n), arb_metric(n)))) {
        let lc = levi_civita(&alg, &g);
        prop_assert!(lc.torsion(&alg).is_zero());
        prop_assert!(metric_residual(&lc, &g).is_zero());
        let r = curvature(&lc, &alg, &g);
        prop_assert!(r.is_antisymmetric_first_pair());
        prop_assert!(r.is_antisymmetric_last_pair());
        // pair symmetry R(X,Y,Z,W) = R(Z,W,X,Y) of the Levi-Civita tensor
        let n = alg.dim();
        for t in 0..n.pow(4) {
            let (x, y, z, w) = (t / (n * n * n), (t / (n * n)) % n, (t / n) % n, t % n);
            prop_assert_eq!(r.get(x, y, z, w), r.get(z, w, x, y));
        }
        let b = bianchi_check(&lc, &alg, &g);
        prop_assert!(b.first_ok && b.second_ok);
    }

    #[test]
    fn holonomy_is_a_lie_algebra((alg, g) in (3usize..=5).prop_flat_map(|n| (arb_algebra(n), arb_metric(n)))) {
        let lc = levi_civita(&alg, &g);
        let hol = holonomy_algebra(&lc, &alg, &g).expect("closure terminates");
        prop_assert!(hol.is_closed_under_bracket());
        prop_assert!(hol.basis.iter().all(|a| g.is_skew(a)));
    }

    #[test]
    fn gauduchon_line_is_hermitian(idx in 0usize..4, num in -6i64..=6, den in 1i64..=4) {
        let entries = [catalog::hopf_su2_r(), catalog::abelian_r4(), catalog::almost_abelian_4(&q(1)), catalog::almost_abelian_4(&Exact::ratio(-1, 2))];
        let e = &entries[idx];
        let t = Exact::ratio(num, den);
        for h in e.data.hermitian_structures() {
            let c = gauduchon_connection(&h, &t);
            prop_assert!(metric_residual(&c, &h.g).is_zero());
            prop_assert!(endo_residual(&c, &h.j).is_zero());
            let r = curvature(&c, &h.algebra, &h.g);
            prop_assert!(r.is_antisymmetric_last_pair());
            let b = bianchi_check(&c, &h.algebra, &h.g);
            prop_assert!(b.first_ok && b.second_ok);
        }
    }

    #[test]
    fn entry_json_roundtrip(a in 0usize..15, b in 0usize..15) {
        let all = catalog::standard_entries();
        let (ea, eb) = (&all[a], &all[b]);
        for e in [ea.clone(), catalog::product(ea, eb).expect("hyper entries")] {
            let text = catalog::to_json(&e);
            let back = catalog::from_json(&text).expect("round trip");
            prop_assert_eq!(&back.name, &e.name);
            prop_assert!(catalog::same_data(&back.data, &e.data));
            prop_assert_eq!(&back.expected, &e.expected);
            prop_assert_eq!(catalog::to_json(&back), text);
        }
    }
}

#[test]
fn j_action_on_even_forms_is_pullback() {
    let q0 = catalog::hopf_su2_r();
    let h = &q0.data.hermitian_structures()[0];
    let a = form_from(4, 2, &[1, -2, 0, 3, 1, -1]);
    assert!(a.j_act(&h.j).sub(&a.pullback(&h.j)).is_zero());
    let b = form_from(4, 3, &[1, 2, 0, -1]);
    assert!(b.j_act(&h.j).add(&b.pullback(&h.j)).is_zero());
}

#[test]
fn forms_above_dimension_vanish() {
    let a = form_from(3, 2, &[1, 1, 1]);
    let b = form_from(3, 2, &[1, -1, 2]);
    assert_eq!(a.wedge(&b).degree(), 4);
    assert!(a.wedge(&b).is_zero());
}
