//! Closed-form m-functions of the Bessel, Legendre and Laguerre examples.

use crate::error::{Error, Result};
use crate::oracles::special::{cos_pi, digamma, gamma_fn, rgamma, sin_pi};
use crate::scalar::{re, Cx, Real};

/// Terms kept explicitly in the product and Mittag-Leffler routes.
pub const PRODUCT_TERMS: usize = 10_000;

/// Σ_{n>N} n^{−s} by Euler–Maclaurin (s ≥ 2).
fn zeta_tail<T: Real>(s: i32, n: usize) -> T {
    let nn = T::from_usize(n).unwrap();
    let st = T::from_i32(s).unwrap();
    nn.powi(1 - s) / (st - T::one()) - nn.powi(-s) * T::lit(0.5) + st * nn.powi(-s - 1) / T::lit(12.0)
        - st * (st + T::one()) * (st + T::lit(2.0)) * nn.powi(-s - 3) / T::lit(720.0)
}

fn check_pole<T: Real>(z: Cx<T>, pole: Cx<T>, what: &str) -> Result<()> {
    if (z - pole).norm() < T::lit(1e-13) * T::one().max(pole.norm()) {
        Err(Error::Pole(format!("{what} at z = {z}")))
    } else {
        Ok(())
    }
}

/// Bessel, γ ∈ [0, 1), Friedrichs condition at 0.
pub fn m_bessel<T: Real>(z: Cx<T>, gamma: T) -> Result<Cx<T>> {
    if !(gamma >= T::zero() && gamma < T::one()) {
        return Err(Error::Argument(format!("Bessel m-function needs gamma in [0, 1), got {gamma}")));
    }
    if z.im == T::zero() && z.re >= T::zero() {
        return Err(Error::Argument(format!("z = {z} lies on the branch cut [0, ∞)")));
    }
    if gamma == T::zero() {
        let c = re(T::LN_2() - T::euler_gamma()) + Cx::new(T::zero(), T::FRAC_PI_2());
        return Ok(c - z.ln() * T::lit(0.5));
    }
    let phase = Cx::new(T::zero(), -T::PI() * gamma).exp();
    let ratio = gamma_fn(re(T::one() - gamma))? / gamma_fn(re(T::one() + gamma))?;
    let scale = T::lit(2.0).powf(-T::lit(2.0) * gamma - T::one()) / gamma;
    Ok(-(phase * ratio * scale * (z.ln() * gamma).exp()))
}

/// ν(z) with ν(ν+1) = z and Re ν ≥ −½.
pub fn legendre_nu<T: Real>(z: Cx<T>) -> Cx<T> {
    ((re(T::one()) + z * T::lit(4.0)).sqrt() - T::one()) * T::lit(0.5)
}

fn legendre_pole_check<T: Real>(z: Cx<T>) -> Result<()> {
    if z.re > -T::one() {
        let n = legendre_nu(re(z.re)).re.round();
        check_pole(z, re(n * (n + T::one())), "Legendre m pole")?;
    }
    Ok(())
}

/// −(π/2)cot(νπ) − γ_E − ψ(1+ν): Legendre, Friedrichs at both ends.
pub fn m_legendre<T: Real>(z: Cx<T>) -> Result<Cx<T>> {
    legendre_pole_check(z)?;
    let nu = legendre_nu(z);
    let cot = cos_pi(nu) / sin_pi(nu);
    Ok(-(cot * T::FRAC_PI_2()) - T::euler_gamma() - digamma(nu + T::one())?)
}

/// Mittag-Leffler form −1/(2z) + Σ_{n≥1}[(n+½)/(n(n+1)−z) − 1/n], with the
/// tail past `terms` summed from its 1/n expansion.
pub fn m_legendre_series<T: Real>(z: Cx<T>, terms: usize) -> Result<Cx<T>> {
    legendre_pole_check(z)?;
    let mut s = -(z * T::lit(2.0)).inv();
    for n in 1..=terms {
        let nn = T::from_usize(n).unwrap();
        s = s + re(nn + T::lit(0.5)) / (re(nn * (nn + T::one())) - z) - nn.recip();
    }
    let half = re(T::lit(0.5));
    let c2 = re(-T::lit(0.5));
    let c3 = z + half;
    let c4 = -(z * T::lit(1.5) + half);
    let c5 = z * z + z * T::lit(2.0) + half;
    s = s
        + c2 * zeta_tail::<T>(2, terms)
        + c3 * zeta_tail::<T>(3, terms)
        + c4 * zeta_tail::<T>(4, terms)
        + c5 * zeta_tail::<T>(5, terms);
    Ok(s)
}

/// Laguerre, Friedrichs condition at 0, β ∈ (0, 2).
pub fn m_laguerre<T: Real>(z: Cx<T>, beta: T) -> Result<Cx<T>> {
    check_beta(beta)?;
    let one = T::one();
    if beta < one {
        // poles n+1−β
        pole_on_lattice(z, one - beta)?;
        let g = gamma_fn(re(beta))? / gamma_fn(re(one - beta))?;
        Ok(-(gamma_fn(re(one - beta) - z)? * rgamma(-z) * g))
    } else if beta > one {
        // poles at ℕ0
        pole_on_lattice(z, T::zero())?;
        let g = gamma_fn(re(T::lit(2.0) - beta))? / gamma_fn(re(beta - one))?;
        Ok(-(gamma_fn(-z)? * rgamma(re(one - beta) - z) * g))
    } else {
        pole_on_lattice(z, T::zero())?;
        Ok(-digamma(-z)? - T::lit(2.0) * T::euler_gamma())
    }
}

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if beta > T::zero() && beta < T::lit(2.0) {
        Ok(())
    } else {
        Err(Error::Argument(format!("beta must lie in (0, 2), got {beta}")))
    }
}

fn pole_on_lattice<T: Real>(z: Cx<T>, offset: T) -> Result<()> {
    let n = (z.re - offset).round();
    if n >= T::zero() {
        check_pole(z, re(n + offset), "Laguerre m pole")?;
    }
    Ok(())
}

/// Π_{n≥n0} Π_i(n + p_i)/Π_j(n + m_j) for Σp = Σm, truncated at `terms`
/// with the tail taken from the 1/n expansion of the log.
fn balanced_product<T: Real>(plus: &[Cx<T>], minus: &[Cx<T>], n0: usize, terms: usize) -> Cx<T> {
    let mut prod = re(T::one());
    for n in n0..=terms {
        let nn = re(T::from_usize(n).unwrap());
        let mut num = re(T::one());
        let mut den = re(T::one());
        for &p in plus {
            num = num * (nn + p);
        }
        for &m in minus {
            den = den * (nn + m);
        }
        prod = prod * num / den;
    }
    // ln(n + a) = ln n + a/n − a²/2n² + a³/3n³ − a⁴/4n⁴ + …
    let mut tail = re(T::zero());
    for s in 2..=5i32 {
        let pw = |a: Cx<T>| a.powi(s);
        let mut c = re(T::zero());
        for &p in plus {
            c = c + pw(p);
        }
        for &m in minus {
            c = c - pw(m);
        }
        let sign = if s % 2 == 0 { -T::one() } else { T::one() };
        tail = tail + c * (sign / T::from_i32(s).unwrap()) * zeta_tail::<T>(s, terms);
    }
    prod * tail.exp()
}

/// Γ(z1)Γ(z2)/(Γ(z1+z3)Γ(z2−z3)) = Π_{n≥0}[1 + z3/(n+z1)][1 − z3/(n+z2)].
pub fn gamma_ratio_product<T: Real>(z1: Cx<T>, z2: Cx<T>, z3: Cx<T>, terms: usize) -> Cx<T> {
    balanced_product(&[z1 + z3, z2 - z3], &[z1, z2], 0, terms)
}

pub fn gamma_ratio<T: Real>(z1: Cx<T>, z2: Cx<T>, z3: Cx<T>) -> Result<Cx<T>> {
    Ok(gamma_fn(z1)? * gamma_fn(z2)? * rgamma(z1 + z3) * rgamma(z2 - z3))
}

/// Laguerre m through the Weierstrass-type products (β ≠ 1).
pub fn m_laguerre_product<T: Real>(z: Cx<T>, beta: T, terms: usize) -> Result<Cx<T>> {
    check_beta(beta)?;
    let one = T::one();
    let b = re(beta);
    // g_n = (n+1)(n−z)/((n+β)(n+1−β−z))
    let plus = [re(one), -z];
    let minus = [b, re(one - beta) - z];
    let g2b = gamma_fn(re(T::lit(2.0) - beta))?;
    if beta < one {
        pole_on_lattice(z, one - beta)?;
        let prod = balanced_product(&plus, &minus, 1, terms);
        Ok(prod * (beta - one) / (g2b * beta) * z / (z - (one - beta)))
    } else if beta > one {
        pole_on_lattice(z, T::zero())?;
        let prod = balanced_product(&minus, &plus, 1, terms);
        Ok(prod * (g2b * (beta * (one - beta))) * (z - (one - beta)) / z)
    } else {
        Err(Error::Argument("the product route covers beta ≠ 1".into()))
    }
}
