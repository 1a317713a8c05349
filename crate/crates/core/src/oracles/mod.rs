//! Special functions, closed-form m-functions and the example catalog.

pub mod catalog;
pub mod mfunctions;
pub mod special;

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, QuadConfig};
use crate::scalar::{re, Cx, Real};

pub use catalog::{catalog, CatalogKind, CatalogProblem};
pub use mfunctions::{
    gamma_ratio, gamma_ratio_product, legendre_nu, m_bessel, m_laguerre, m_laguerre_product, m_legendre,
    m_legendre_series, PRODUCT_TERMS,
};
pub use special::{
    bessel_j, bessel_j_cx, digamma, gamma_fn, gamma_real, kummer_f, kummer_f_prime, legendre_p,
    legendre_p_near_minus_one, legendre_poly, rgamma,
};

/// C₀ = ∫₀¹ t(1 − ln t)eᵗ dt, by adaptive quadrature, computed once.
pub fn laguerre_c0() -> f64 {
    static C0: OnceLock<f64> = OnceLock::new();
    *C0.get_or_init(|| {
        let cfg = QuadConfig { rel_tol: 1e-15, abs_tol: 1e-16, max_intervals: 2000 };
        integrate_adaptive(|t: f64| Ok(re(t * (1.0 - t.ln()) * t.exp())), 0.0, 1.0, &cfg)
            .map(|r| r.value.re)
            .unwrap_or(f64::NAN)
    })
}

/// lim_{x→0} [∫ₓ¹ eᵗ/t dt + ln x] = Σ_{k≥1} 1/(k·k!) = Ei(1) − γ_E.
pub fn laguerre_ein1() -> f64 {
    let (mut term, mut sum) = (1.0f64, 0.0f64);
    for k in 1..30 {
        term /= k as f64;
        sum += term / k as f64;
    }
    sum
}

const MAX_TERMS: usize = 4000;

/// Laguerre y₁(z, x) = F(−z, β; x) and its quasi-derivative x^β e^{−x} y₁′.
pub fn laguerre_y1<T: Real>(z: Cx<T>, beta: T, x: T) -> Result<(Cx<T>, Cx<T>)> {
    let (a, b) = (-z, re(beta));
    let f = special::kummer_f(a, b, x)?;
    let fp = special::kummer_f_prime(a, b, x)?;
    Ok((f, fp * (x.powf(beta) * (-x).exp())))
}

/// Laguerre y₂(z, x): x^{1−β}F(1−β−z, 2−β; x) for β ≠ 1 and Γ(−z)U(−z, 1; x) for
/// β = 1 (z ∉ ℕ₀), with quasi-derivatives. W(y₁, y₂) = 1−β, or −1 at β = 1.
pub fn laguerre_y2<T: Real>(z: Cx<T>, beta: T, x: T) -> Result<(Cx<T>, Cx<T>)> {
    if x <= T::zero() {
        return Err(Error::Argument("laguerre_y2 needs x > 0".into()));
    }
    let p = x.powf(beta) * (-x).exp();
    if beta != T::one() {
        let s = T::one() - beta;
        let (a, b) = (re(s) - z, re(T::one() + s));
        let f = special::kummer_f(a, b, x)?;
        let fp = special::kummer_f_prime(a, b, x)?;
        let xs = x.powf(s);
        let d = (f * s / x + fp) * xs;
        return Ok((f * xs, d * p));
    }
    // Γ(−z)U(−z,1;x) = −Σ (−z)_k/(k!)² x^k [ln x + ψ(−z+k) − 2ψ(1+k)]
    let a = -z;
    let lx = x.ln();
    let mut psi_a = special::digamma(a)?;
    let mut psi_1 = -T::euler_gamma();
    let mut c = re(T::one()); // (a)_k/(k!)²
    let mut xk = T::one();
    let (mut y, mut dy) = (re(T::zero()), re(T::zero()));
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let kk = T::from_usize(k).unwrap();
        let bracket = re(lx) + psi_a - re(psi_1 * T::lit(2.0));
        let term = c * xk * bracket;
        // d/dx: k x^{k−1} bracket + x^{k−1}
        let dterm = if k == 0 { re(x.recip()) * c } else { c * (xk / x) * (bracket * kk + T::one()) };
        y = y - term;
        dy = dy - dterm;
        if term.norm() <= T::lit(1e-17) * y.norm() && kk > x + a.norm() {
            quiet += 1;
            if quiet >= 2 {
                return Ok((y, dy * p));
            }
        } else {
            quiet = 0;
        }
        let next = kk + T::one();
        c = c * (a + kk) / (next * next);
        xk = xk * x;
        psi_a = psi_a + (a + kk).inv();
        psi_1 = psi_1 + next.recip();
    }
    Err(Error::Series { what: "laguerre_y2 (log case)", terms: MAX_TERMS })
}
