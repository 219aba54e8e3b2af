use elliptica_core::algebra::jordan::jordan_decompose;
use elliptica_core::components::classify_element;
use elliptica_core::cone::{
    basic_routes, generate_causal_curve, in_max_cone, k_projection_curve, tau, tau_on_torus, CurveConfig,
};
use elliptica_core::ellipticity::{is_stably_elliptic, wall_margin};
use elliptica_core::linalg;
use elliptica_core::quasimorphism::{f_gw_closed_form, f_gw_principal};
use elliptica_core::{sample, Algebra, Family, GroupElement, LieAlgebra};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

fn sp4() -> Algebra {
    LieAlgebra::new(Family::Sp { n: 2 })
}

fn conjugator(alg: &Algebra, seed: u64) -> GroupElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample::group(alg, &mut rng, 0.5)
}

/// Angles whose noncompact root values stay `1e-2` away from `2 pi Z`.
fn off_wall(alg: &Algebra, x: &[f64]) -> bool {
    wall_margin(x, alg.root_datum().unwrap()) > 1e-2
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn component_class_is_conjugation_invariant(a in -TAU..TAU, b in -TAU..TAU, seed in any::<u64>()) {
        let alg = sp4();
        prop_assume!(off_wall(&alg, &[a, b]));
        let g = alg.torus(&[a, b]).unwrap().exp();
        let h = conjugator(&alg, seed);
        let gh = g.conjugate_by(&h).unwrap();
        prop_assert!(is_stably_elliptic(&gh).unwrap());
        let lattice = alg.root_datum().unwrap().matrix_lattice().clone();
        let c0 = classify_element(&g, &lattice).unwrap();
        let c1 = classify_element(&gh, &lattice).unwrap();
        prop_assert_eq!(c0.canonical, c1.canonical);
    }

    #[test]
    fn closed_form_is_conjugation_invariant_and_homogeneous(
        a in -3.0..3.0f64, b in -3.0..3.0f64, k in 1u32..4, seed in any::<u64>()
    ) {
        let alg = sp4();
        let x = alg.torus(&[a, b]).unwrap();
        let f = f_gw_closed_form(&x).unwrap().value;
        let h = conjugator(&alg, seed);
        let fc = f_gw_closed_form(&x.conjugate(&h).unwrap()).unwrap().value;
        prop_assert!((f - fc).abs() < 1e-8, "{} vs {}", f, fc);
        let fk = f_gw_closed_form(&x.scale(k as f64)).unwrap().value;
        prop_assert!((fk - k as f64 * f).abs() < 1e-8 * (1.0 + fk.abs()));
        // mean of the root values 2a, 2b and a + b
        prop_assert!((f - (a + b)).abs() < 1e-8);
    }

    #[test]
    fn cone_membership_is_ad_invariant(a in -2.0..2.0f64, b in -2.0..2.0f64, seed in any::<u64>()) {
        prop_assume!(a.abs() > 1e-2 && b.abs() > 1e-2);
        let alg = sp4();
        let x = alg.torus(&[a, b]).unwrap();
        let expected = a > 0.0 && b > 0.0;
        let xc = x.conjugate(&conjugator(&alg, seed)).unwrap();
        prop_assert_eq!(in_max_cone(&x).unwrap().member, expected);
        prop_assert_eq!(in_max_cone(&xc).unwrap().member, expected);
    }

    #[test]
    fn krein_and_alcove_routes_agree(a in -TAU..TAU, b in -TAU..TAU, seed in any::<u64>()) {
        let alg = sp4();
        prop_assume!(off_wall(&alg, &[a, b]));
        let g = alg.torus(&[a, b]).unwrap().exp().conjugate_by(&conjugator(&alg, seed)).unwrap();
        let r = basic_routes(&g).unwrap();
        prop_assert_eq!(r.krein, Some(r.alcove));
    }

    #[test]
    fn tau_is_conjugation_invariant(a in 0.05..3.0f64, b in 0.05..3.0f64, seed in any::<u64>()) {
        let alg = sp4();
        let x = [a, b];
        let datum = alg.root_datum().unwrap();
        let oracle: f64 = [2.0 * a, 2.0 * b, a + b].iter().map(|v| v.ln() - (TAU - v).ln()).sum();
        prop_assert!((tau_on_torus(datum, &x).unwrap() - oracle).abs() < 1e-12);
        let g = alg.torus(&x).unwrap().exp().conjugate_by(&conjugator(&alg, seed)).unwrap();
        let t = tau(&g).unwrap();
        prop_assert!((t - oracle).abs() < 1e-6 * (1.0 + oracle.abs()), "{} vs {}", t, oracle);
    }

    #[test]
    fn f_gw_is_bounded_on_the_basic_component(a in 0.02..3.1f64, b in 0.02..3.1f64, seed in any::<u64>()) {
        let alg = sp4();
        let g = alg.torus(&[a, b]).unwrap().exp().conjugate_by(&conjugator(&alg, seed)).unwrap();
        let f = f_gw_principal(&g).unwrap();
        prop_assert!(f > 0.0 && f < TAU, "{}", f);
    }

    #[test]
    fn jordan_parts_commute_and_sum(seed in any::<u64>(), family in 0usize..3) {
        let f = [Family::Sl2, Family::Sp { n: 2 }, Family::Su { p: 2, q: 1 }][family];
        let alg = LieAlgebra::new(f);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample::gaussian(&alg, &mut rng, 1.0);
        let p = jordan_decompose(&x).unwrap();
        let s = p.elliptic.add(&p.hyperbolic).unwrap().add(&p.nilpotent).unwrap();
        let scale = x.norm().max(1.0);
        prop_assert!(s.sub(&x).unwrap().norm() < 1e-9 * scale);
        prop_assert!(p.elliptic.bracket(&p.hyperbolic).unwrap().norm() < 1e-9 * scale * scale);
    }
}

#[test]
fn k_projection_of_a_causal_curve_stays_in_the_cone() {
    let alg = sp4();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let curve = generate_causal_curve(&alg, &mut rng, &CurveConfig::new(&alg, 30).unwrap()).unwrap();
    for (k, vk) in k_projection_curve(&curve).unwrap() {
        let m = linalg::real_part(k.matrix());
        let orth = (m.transpose() * &m - linalg::RMat::identity(4, 4)).norm();
        assert!(orth < 1e-8, "k is not orthogonal ({orth:.2e})");
        assert!(in_max_cone(&vk).unwrap().member);
    }
}

#[test]
fn exp_pi_z_has_zero_tau() {
    let alg = sp4();
    let d = alg.root_datum().unwrap();
    let g = alg.torus(&d.z).unwrap().scale(PI).exp();
    assert!(tau(&g).unwrap().abs() < 1e-12);
}
