use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

use slspec_core::bvals::{boundary_values, LimitConfig};
use slspec_core::extensions::{validate, BoundaryCondition, Mat2};
use slspec_core::integrator::{integrate, IntegratorConfig};
use slspec_core::model::{wronskian, Bound, EndpointClass, Side};
use slspec_core::oracles::{catalog, m_legendre, m_legendre_series};
use slspec_core::solution::SolutionHandle;
use slspec_core::spectral::{m_function, mobius_alpha_shift, SpectralConfig, SpectralSetup};
use slspec_core::{cx, Complex64, Problem, State};

const LC: [EndpointClass; 2] = [EndpointClass::LimitCircle, EndpointClass::LimitCircle];

fn regular(c1: f64, c2: f64, c3: f64) -> Problem {
    Problem::new(
        Bound::Finite(-1.0),
        Bound::Finite(3.0),
        move |x: f64| 1.0 + c1 * x * x,
        move |x: f64| c2 * x.sin(),
        move |x: f64| 1.0 + c3 * (x + 1.0),
    )
    .unwrap()
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| cx(a, b))
}

fn state_at(x: f64) -> impl Strategy<Value = State> {
    (complex(), complex()).prop_map(move |(u, u1)| State::new(x, u, u1))
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wronskian_antisymmetric(f in state_at(0.3), g in state_at(0.3)) {
        let w = wronskian(&f, &g).unwrap();
        prop_assert_eq!(w, -wronskian(&g, &f).unwrap());
        prop_assert_eq!(wronskian(&f, &f).unwrap(), cx(0.0, 0.0));
    }

    #[test]
    fn wronskian_constant_along_solutions(
        c in (0.0..1.0f64, -2.0..2.0f64, 0.0..1.0f64), z in complex(), f in state_at(0.0), g in state_at(0.0)
    ) {
        let p = regular(c.0, c.1, c.2);
        let cfg = IntegratorConfig::default();
        let w0 = wronskian(&f, &g).unwrap();
        for x in [-0.8, 1.0, 2.7] {
            let tf = integrate(&p, z, &f, x, &cfg).unwrap();
            let tg = integrate(&p, z, &g, x, &cfg).unwrap();
            prop_assert!(close(wronskian(tf.last(), tg.last()).unwrap(), w0, 1e-7));
        }
    }

    #[test]
    fn integration_is_reversible(c in (0.0..1.0f64, -2.0..2.0f64, 0.0..1.0f64), z in complex(), s in state_at(0.5)) {
        let p = regular(c.0, c.1, c.2);
        let cfg = IntegratorConfig::default();
        let there = *integrate(&p, z, &s, 2.5, &cfg).unwrap().last();
        let back = *integrate(&p, z, &there, 0.5, &cfg).unwrap().last();
        prop_assert!(close(back.u, s.u, 1e-7) && close(back.u1, s.u1, 1e-7));
    }

    #[test]
    fn integration_is_linear(z in complex(), f in state_at(0.0), g in state_at(0.0), a in complex(), b in complex()) {
        let p = regular(0.3, 1.0, 0.5);
        let cfg = IntegratorConfig::default();
        let h = f.combine(a, g, b);
        let at = |s: &State| *integrate(&p, z, s, 2.0, &cfg).unwrap().last();
        let (ff, gg, hh) = (at(&f), at(&g), at(&h));
        prop_assert!(close(hh.u, ff.u * a + gg.u * b, 1e-7));
        prop_assert!(close(hh.u1, ff.u1 * a + gg.u1 * b, 1e-7));
    }

    #[test]
    fn boundary_values_bilinear(gamma in 0.0..0.9f64, a in complex(), b in complex()) {
        let cp = catalog::<f64>("bessel", &[("gamma", gamma)]).unwrap();
        let basis = cp.basis(Side::Left).unwrap();
        let fam = cp.test_family(Side::Left).unwrap();
        let (g, h) = (&fam[0].1, &fam[1].1);
        let combo = SolutionHandle::combination(vec![(a, g.clone()), (b, h.clone())]).unwrap();
        let cfg = LimitConfig::default();
        let (bg, bh, bc) = (
            boundary_values(g, &basis, &cfg).unwrap(),
            boundary_values(h, &basis, &cfg).unwrap(),
            boundary_values(&combo, &basis, &cfg).unwrap(),
        );
        prop_assert!(close(bc.g_tilde, bg.g_tilde * a + bh.g_tilde * b, 1e-8));
        prop_assert!(close(bc.g_tilde_prime, bg.g_tilde_prime * a + bh.g_tilde_prime * b, 1e-8));
    }

    #[test]
    fn mobius_group_property(m in complex(), d1 in -1.5..1.5f64, d2 in -1.5..1.5f64) {
        prop_assume!(m.im.abs() > 0.1);
        let two = mobius_alpha_shift(mobius_alpha_shift(m, 0.0, d1).unwrap(), d1, d1 + d2).unwrap();
        let one = mobius_alpha_shift(m, 0.0, d1 + d2).unwrap();
        prop_assert!(close(one, two, 1e-10));
        let back = mobius_alpha_shift(one, d1 + d2, 0.0).unwrap();
        prop_assert!(close(back, m, 1e-10));
    }

    #[test]
    fn coupled_embeds_as_valid_matrix(phi in 0.0..TAU, r00 in 0.2..3.0f64, r01 in -3.0..3.0f64, r10 in -3.0..3.0f64) {
        let r = [[r00, r01], [r10, (1.0 + r01 * r10) / r00]];
        let bc = BoundaryCondition::coupled(phi, r, LC).unwrap();
        let (a, b) = bc.as_matrix().unwrap();
        let m = BoundaryCondition::matrix(a, b, LC).unwrap();
        prop_assert!(validate(&m).valid, "{:?}", validate(&m));
    }

    #[test]
    fn separated_embeds_as_valid_matrix(al in 0.0..PI, be in 0.0..PI) {
        let bc = BoundaryCondition::separated(Some(al), Some(be), LC).unwrap();
        let (a, b) = bc.as_matrix().unwrap();
        prop_assert!(validate(&BoundaryCondition::matrix(a, b, LC).unwrap()).valid);
    }

    #[test]
    fn scaled_or_degenerate_pairs_fail(phi in 0.0..TAU, s in 1.1..4.0f64, t in complex()) {
        let e = cx(phi.cos(), phi.sin());
        let scaled = BoundaryCondition::matrix(Mat2::identity().scale(e * s), Mat2::identity(), LC).unwrap();
        prop_assert!(!validate(&scaled).valid);
        let row = Mat2::new(cx(1.0, 0.0), t, cx(0.0, 0.0), cx(0.0, 0.0));
        let rank1 = BoundaryCondition::matrix(row, row.scale(e), LC).unwrap();
        prop_assert!(!validate(&rank1).valid);
    }

    #[test]
    fn legendre_routes_agree(re_z in -5.0..15.0f64, im_z in 0.2..5.0f64) {
        let z = cx(re_z, im_z);
        prop_assert!(close(m_legendre(z).unwrap(), m_legendre_series(z, 10_000).unwrap(), 1e-10));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn m_conjugate_symmetric(gamma in 0.0..0.9f64, re_z in -2.0..3.0f64, im_z in 0.3..2.0f64) {
        let cp = catalog::<f64>("bessel", &[("gamma", gamma)]).unwrap();
        let s = SpectralSetup::from_catalog(&cp).unwrap();
        let cfg = SpectralConfig::default();
        let z = cx(re_z, im_z);
        let m = m_function(&s, 0.0, None, z, &cfg).unwrap().m;
        let mc = m_function(&s, 0.0, None, z.conj(), &cfg).unwrap().m;
        prop_assert!(close(mc, m.conj(), 1e-8));
        prop_assert!(m.im > 0.0);
    }
}
