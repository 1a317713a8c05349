use std::f64::consts::FRAC_PI_2;

use slspec_core::bvals::{boundary_values, LimitConfig};
use slspec_core::extensions::{friedrichs, BoundaryCondition};
use slspec_core::oracles::catalog;
use slspec_core::spectral::{eigenvalues, m_function, mobius_alpha_shift, shoot_left, SpectralConfig, SpectralSetup};
use slspec_core::{cx, re, Catalog, Setup};

fn setup(name: &str, params: &[(&str, f64)]) -> (Catalog, Setup) {
    let cp = catalog::<f64>(name, params).unwrap();
    let s = SpectralSetup::from_catalog(&cp).unwrap();
    (cp, s)
}

fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < tol, "{got:?} vs {want:?}");
    }
}

#[test]
fn legendre_friedrichs_spectrum() {
    let (cp, s) = setup("legendre", &[]);
    let e = eigenvalues(&s, &friedrichs(cp.classes), (-0.5, 25.0), &SpectralConfig::default()).unwrap();
    assert_close(&e.eigenvalues, &[0.0, 2.0, 6.0, 12.0, 20.0], 1e-6);
    assert!(e.characteristic_residuals.iter().all(|r| *r < 1e-6));
    assert!(!e.bracket_info.widened);
}

#[test]
fn laguerre_friedrichs_and_neumann() {
    let cfg = SpectralConfig::default();
    let (cp, s) = setup("laguerre", &[("beta", 0.5)]);
    let e = eigenvalues(&s, &friedrichs(cp.classes), (0.0, 5.2), &cfg).unwrap();
    assert_close(&e.eigenvalues, &[0.5, 1.5, 2.5, 3.5, 4.5], 1e-5);
    assert!(e.bracket_info.truncation.is_some());
    let neumann = BoundaryCondition::separated(Some(FRAC_PI_2), None, cp.classes).unwrap();
    let e = eigenvalues(&s, &neumann, (-0.5, 4.5), &cfg).unwrap();
    assert_close(&e.eigenvalues, &[0.0, 1.0, 2.0, 3.0, 4.0], 1e-5);

    let (cp, s) = setup("laguerre", &[("beta", 1.5)]);
    let e = eigenvalues(&s, &friedrichs(cp.classes), (-0.5, 4.5), &cfg).unwrap();
    assert_close(&e.eigenvalues, &[0.0, 1.0, 2.0, 3.0, 4.0], 1e-5);
}

#[test]
fn coupled_conditions_are_not_solved() {
    let (cp, s) = setup("legendre", &[]);
    let per = BoundaryCondition::coupled(0.0, [[1.0, 0.0], [0.0, 1.0]], cp.classes).unwrap();
    assert!(eigenvalues(&s, &per, (0.0, 1.0), &SpectralConfig::default()).is_err());
}

#[test]
fn shooting_reproduces_boundary_data() {
    let cfg = SpectralConfig::default();
    let lcfg = LimitConfig::default();
    let (_, s) = setup("legendre", &[]);
    // α = 0, λ = 2: φ is a multiple of P₁ = x
    let phi = shoot_left(&s, 0.0, re(2.0), &cfg).unwrap();
    let bv = boundary_values(&phi, &s.basis_a, &lcfg).unwrap();
    assert!(bv.g_tilde.norm() < 1e-8 && (bv.g_tilde_prime - 1.0).norm() < 1e-8, "{bv:?}");
    let c = phi.eval(0.3).unwrap().u / 0.3;
    for x in [-0.9, -0.2, 0.6, 0.95] {
        assert!((phi.eval(x).unwrap().u - c * x).norm() < 1e-8);
    }
    // α = π/2
    let phi = shoot_left(&s, FRAC_PI_2, cx(1.0, 0.5), &cfg).unwrap();
    let bv = boundary_values(&phi, &s.basis_a, &lcfg).unwrap();
    assert!((bv.g_tilde + 1.0).norm() < 1e-8 && bv.g_tilde_prime.norm() < 1e-8, "{bv:?}");

    // Bessel γ = ½: φ₀ ∝ x^{1/2}J_{1/2}(kx) ∝ sin(kx)
    let (_, s) = setup("bessel", &[("gamma", 0.5)]);
    let k: f64 = 1.7;
    let phi = shoot_left(&s, 0.0, re(k * k), &cfg).unwrap();
    for x in [0.01, 0.4, 2.0, 9.0] {
        let want = (k * x).sin() / k;
        assert!((phi.eval(x).unwrap().u - want).norm() < 1e-8, "x = {x}");
    }
}

#[test]
fn m_matches_closed_forms() {
    type Case = (&'static str, Vec<(&'static str, f64)>, Vec<(f64, f64)>);
    let cfg = SpectralConfig::default();
    let cases: Vec<Case> = vec![
        ("bessel", vec![("gamma", 0.0)], vec![(0.0, 1.0), (-1.0, 0.5)]),
        ("bessel", vec![("gamma", 0.75)], vec![(0.0, 2.0)]),
        ("legendre", vec![], vec![(-1.0, 0.0), (3.0, 2.0)]),
        ("laguerre", vec![("beta", 1.0)], vec![(-0.3, 0.0), (0.4, 1.0)]),
        ("regular_free", vec![], vec![(2.0, 1.0)]),
    ];
    for (name, params, zs) in cases {
        let (cp, s) = setup(name, &params);
        let beta0 = s.lc_right().then_some(0.0);
        for (x, y) in zs {
            let z = cx(x, y);
            let m = m_function(&s, 0.0, beta0, z, &cfg).unwrap();
            let exact = cp.m_exact(z).unwrap();
            assert!((m.m - exact).norm() < 1e-7 * exact.norm(), "{name} {params:?} z = {z}: {} vs {exact}", m.m);
        }
    }
}

#[test]
fn m_conjugate_symmetry_and_alpha_shift() {
    let cfg = SpectralConfig::default();
    let (_, s) = setup("legendre", &[]);
    let z = cx(0.7, 1.3);
    let m = m_function(&s, 0.0, Some(0.0), z, &cfg).unwrap().m;
    let mc = m_function(&s, 0.0, Some(0.0), z.conj(), &cfg).unwrap().m;
    assert!((mc - m.conj()).norm() < 1e-8);
    let a1 = 0.6;
    let m1 = m_function(&s, a1, Some(0.0), z, &cfg).unwrap().m;
    let shifted = mobius_alpha_shift(m, 0.0, a1).unwrap();
    assert!((m1 - shifted).norm() < 1e-7 * m1.norm(), "{m1} vs {shifted}");
}

#[test]
fn eigenvalues_sit_at_poles_of_m() {
    let cfg = SpectralConfig::default();
    let (cp, s) = setup("legendre", &[]);
    let e = eigenvalues(&s, &friedrichs(cp.classes), (-0.5, 13.0), &cfg).unwrap();
    for l in e.eigenvalues {
        let inv = |x: f64| 1.0 / m_function(&s, 0.0, Some(0.0), re(x), &cfg).unwrap().m.re;
        assert!(inv(l - 1e-3) * inv(l + 1e-3) < 0.0, "no sign change of 1/m at {l}");
    }
}

#[test]
fn limit_point_truncation_reports_radius() {
    let (_, s) = setup("bessel", &[("gamma", 0.5)]);
    let m = m_function(&s, 0.0, None, cx(0.0, 1.0), &SpectralConfig::default()).unwrap();
    assert!(m.truncation_radius.unwrap() >= 32.0 && m.disk_radius_estimate < 1e-9);
    assert!(m_function(&s, 0.0, Some(0.0), cx(0.0, 1.0), &SpectralConfig::default()).is_err());
}
