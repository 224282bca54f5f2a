//! Products of entries and the 8-dimensional structure analysis.

use hkt::catalog::{self, CatalogEntry};
use hkt::linalg::Mat;
use hkt::quaternionic::is_hkt;
use hkt::structure8::{einstein_scale_invariant, Regime, Structure8, Structure8Error, VerticalType};
use hkt::verify::{classify_entry, Options};
use hkt::{Exact, Scalar};

/// The `n × (n + m)` (or `m × (n + m)`) matrix of the projection onto one
/// block of a product.
fn projection(rows: usize, total: usize, offset: usize) -> Mat<Exact> {
    Mat::from_fn(rows, total, |i, j| if j == i + offset { Exact::one() } else { Exact::zero() })
}

fn torsion(e: &CatalogEntry<Exact>) -> hkt::multilinear::Form<Exact> {
    is_hkt(e.hyper().expect("hyper entry")).expect("computes").h().clone()
}

fn flag(e: &CatalogEntry<Exact>, name: &str) -> bool {
    classify_entry(e, Options::default()).expect("classifies").flags[name]
}

#[test]
fn product_torsion_is_sum_of_pulled_back_torsions() {
    let pairs = [
        (catalog::hopf_su2_r(), catalog::hopf_su2_r()),
        (catalog::hopf_su2_r(), catalog::abelian_r4()),
        (catalog::almost_abelian_4(&Exact::one()), catalog::hopf_su2_r()),
    ];
    for (a, b) in &pairs {
        let p = catalog::product(a, b).expect("hyper factors");
        let (n, m) = (a.dim(), b.dim());
        let expected = torsion(a)
            .pullback(&projection(n, n + m, 0))
            .add(&torsion(b).pullback(&projection(m, n + m, n)));
        assert!(torsion(&p).sub(&expected).is_zero(), "{} × {}", a.name, b.name);
        for name in ["hkt", "parallel_torsion", "strong_hkt"] {
            assert_eq!(flag(&p, name), flag(a, name) && flag(b, name), "{name} on {} × {}", a.name, b.name);
        }
    }
}

#[test]
fn hopf_square_is_not_equivalence_consistent() {
    let e = catalog::hopf_x_hopf();
    let s = Structure8::new(e.hyper().unwrap(), true, Regime::Observed).expect("qualifies");
    let r = s.report();
    assert_eq!(r.regime, Regime::Observed);
    assert_eq!(r.equivalence_flags.values(), [true, true, true, false, false]);
    assert!(!r.equivalence_flags.consistent);
    assert!(r.dv_flat.is_zero());
    assert!(r.eta.iter().any(|eta| !eta.is_zero()));
}

#[test]
fn su3_is_consistent_and_of_type_u1_su2() {
    let e = catalog::su3_samelson();
    let s = Structure8::new(e.hyper().unwrap(), true, Regime::Asserted).expect("qualifies");
    let r = s.report();
    assert_eq!(r.vertical_type, VerticalType::U1Su2);
    assert!(r.equivalence_flags.consistent);
    assert!(r.checks.iter().all(|c| !c.failed()), "{:?}", r.checks.iter().filter(|c| c.failed()).map(|c| &c.id).collect::<Vec<_>>());
}

#[test]
fn einstein_constant_scales_inversely_with_the_metric() {
    let q = catalog::su3_samelson().hyper().unwrap().clone();
    let two = Exact::int(2);
    let doubled = q.with_metric(q.g.scaled(&two));
    let s1 = Structure8::new(&q, false, Regime::Observed).unwrap();
    let s2 = Structure8::new(&doubled, false, Regime::Observed).unwrap();
    let l1 = s1.hkt_einstein_check().lambda.expect("Einstein");
    let l2 = s2.hkt_einstein_check().lambda.expect("Einstein");
    assert_eq!(l2, l1.clone() / two.clone());
    // λ/‖V‖² is a scale invariant
    let i1 = einstein_scale_invariant(&q).unwrap().unwrap();
    let i2 = einstein_scale_invariant(&doubled).unwrap().unwrap();
    assert_eq!(i1, i2);
    // whereas λ·‖V‖² is not: it picks up a factor 1/4 under g ↦ 2g
    let p1 = l1 * s1.euler_field().norm_sq.clone();
    let p2 = l2 * s2.euler_field().norm_sq.clone();
    assert_eq!(p2 * Exact::int(4), p1);
}

#[test]
fn flat_space_is_rejected_as_hyperkahler() {
    let e = catalog::abelian_r8();
    let err = Structure8::new(e.hyper().unwrap(), true, Regime::Observed).unwrap_err();
    assert_eq!(err, Structure8Error::HyperKahler);
}

#[test]
fn non_strong_and_wrong_dimension_are_rejected() {
    let e = catalog::dotti_fino_nilpotent();
    let err = Structure8::new(e.hyper().unwrap(), true, Regime::Observed).unwrap_err();
    assert_eq!(err, Structure8Error::NotStrong);
    let c = classify_entry(&e, Options::default()).unwrap();
    assert!(c.structure8.is_none());
    assert!(c.structure8_skip.is_some());
    let e = catalog::hopf_su2_r();
    let err = Structure8::new(e.hyper().unwrap(), true, Regime::Observed).unwrap_err();
    assert_eq!(err, Structure8Error::Dimension(4));
}

#[test]
fn catalog_entries_roundtrip_through_files() {
    let dir = std::env::temp_dir().join(format!("hkt-structures-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for e in catalog::standard_entries() {
        let p = dir.join(format!("{}.json", e.name));
        catalog::save_entry(&e, &p).unwrap();
        let back = catalog::load_entry(&p).unwrap();
        assert_eq!(back.name, e.name);
        assert!(catalog::same_data(&back.data, &e.data), "{}", e.name);
        assert_eq!(back.expected, e.expected);
    }
}
