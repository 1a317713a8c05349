//! Gamma, digamma, Bessel J, Kummer F and Legendre P_ν by series.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cx, norm1, re, Cx, Real};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const POLE_TOL: f64 = 1e-13;

fn near_nonpositive_integer<T: Real>(z: Cx<T>) -> bool {
    if z.re > T::lit(0.5) {
        return false;
    }
    let n = z.re.round();
    (z - re(n)).norm() < T::lit(POLE_TOL)
}

/// sin(πz) with exact reduction of the real part.
pub(crate) fn sin_pi<T: Real>(z: Cx<T>) -> Cx<T> {
    let n = z.re.round();
    let w = (z - re(n)) * T::PI();
    let s = w.sin();
    if (n.to_i64().unwrap_or(0)) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// cos(πz) with exact reduction of the real part.
pub(crate) fn cos_pi<T: Real>(z: Cx<T>) -> Cx<T> {
    let n = z.re.round();
    let w = (z - re(n)) * T::PI();
    let c = w.cos();
    if (n.to_i64().unwrap_or(0)) % 2 == 0 {
        c
    } else {
        -c
    }
}

fn lanczos<T: Real>(z: Cx<T>) -> Cx<T> {
    // Γ(z) for Re z ≥ 1/2
    let z = z - T::one();
    let mut acc = re(T::lit(LANCZOS[0]));
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + re(T::lit(c)) / (z + T::from_usize(i).unwrap());
    }
    let t = z + T::lit(LANCZOS_G + 0.5);
    let lead = ((z + T::lit(0.5)) * t.ln() - t).exp();
    acc * lead * (T::TAU()).sqrt()
}

/// Γ(z); pole error within 1e−13 of a nonpositive integer.
pub fn gamma_fn<T: Real>(z: Cx<T>) -> Result<Cx<T>> {
    if near_nonpositive_integer(z) {
        return Err(Error::Pole(format!("Gamma at {z}")));
    }
    if z.re < T::lit(0.5) {
        Ok(re(T::PI()) / (sin_pi(z) * lanczos(Complex::new(T::one(), T::zero()) - z)))
    } else {
        Ok(lanczos(z))
    }
}

/// 1/Γ(z), entire.
pub fn rgamma<T: Real>(z: Cx<T>) -> Cx<T> {
    if z.re < T::lit(0.5) {
        sin_pi(z) * lanczos(re(T::one()) - z) / T::PI()
    } else {
        lanczos(z).inv()
    }
}

pub fn gamma_real<T: Real>(x: T) -> Result<T> {
    gamma_fn(re(x)).map(|g| g.re)
}

/// ψ = Γ′/Γ by reflection, upward recurrence and the asymptotic series.
pub fn digamma<T: Real>(z: Cx<T>) -> Result<Cx<T>> {
    if near_nonpositive_integer(z) {
        return Err(Error::Pole(format!("digamma at {z}")));
    }
    if z.re < T::lit(0.5) {
        // ψ(z) = ψ(1 − z) − π cot(πz)
        let cot = cos_pi(z) / sin_pi(z);
        return Ok(digamma(re(T::one()) - z)? - cot * T::PI());
    }
    let mut z = z;
    let mut acc = re(T::zero());
    while z.norm() < T::lit(12.0) {
        acc = acc - z.inv();
        z = z + T::one();
    }
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
        -3617.0 / 8160.0,
    ];
    let w = (z * z).inv();
    let mut series = re(T::zero());
    for &c in C.iter().rev() {
        series = (series + re(T::lit(c))) * w;
    }
    Ok(acc + z.ln() - z.inv() * T::lit(0.5) - series)
}

const MAX_TERMS: usize = 4000;

/// J_ν(w) by its power series (ν not a negative integer).
pub fn bessel_j_cx<T: Real>(nu: T, w: Cx<T>) -> Result<Cx<T>> {
    let half = w * T::lit(0.5);
    let lead = if w == re(T::zero()) {
        if nu == T::zero() {
            re(T::one())
        } else {
            re(T::zero())
        }
    } else {
        (half.ln() * nu).exp()
    };
    let mut term = lead * rgamma(re(nu + T::one()));
    let mut sum = term;
    let q = -(half * half);
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let kk = T::from_usize(k + 1).unwrap();
        term = term * q / (kk * (kk + nu));
        sum = sum + term;
        if norm1(term) <= T::lit(1e-17) * norm1(sum) && kk > half.norm() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Series { what: "bessel_j", terms: MAX_TERMS })
}

/// J_ν(x) for real x ≥ 0.
pub fn bessel_j<T: Real>(nu: T, x: T) -> Result<T> {
    if x < T::zero() {
        return Err(Error::Argument("bessel_j needs x ≥ 0".into()));
    }
    Ok(bessel_j_cx(nu, re(x))?.re)
}

/// Kummer's F(a, b; x) = Σ (a)_k/(b)_k x^k/k!.
pub fn kummer_f<T: Real>(a: Cx<T>, b: Cx<T>, x: T) -> Result<Cx<T>> {
    if near_nonpositive_integer(b) {
        return Err(Error::Pole(format!("Kummer F with b = {b}")));
    }
    let mut term = re(T::one());
    let mut sum = term;
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let kk = T::from_usize(k).unwrap();
        term = term * (a + kk) / (b + kk) * (x / (kk + T::one()));
        sum = sum + term;
        if term == re(T::zero()) {
            return Ok(sum);
        }
        let past_peak = (a + kk).norm() < (b + kk).norm() * (kk + T::one()) / x.abs().max(T::min_positive_value());
        if past_peak && norm1(term) <= T::lit(1e-17) * norm1(sum) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Series { what: "kummer_f", terms: MAX_TERMS })
}

/// d/dx F(a, b; x) = (a/b) F(a+1, b+1; x).
pub fn kummer_f_prime<T: Real>(a: Cx<T>, b: Cx<T>, x: T) -> Result<Cx<T>> {
    Ok(a / b * kummer_f(a + T::one(), b + T::one(), x)?)
}

/// Legendre polynomial P_n(x) by three-term recurrence.
pub fn legendre_poly<T: Real>(n: usize, x: T) -> T {
    let (mut p0, mut p1) = (T::one(), x);
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let k = T::from_usize(k).unwrap();
        let p2 = ((k + k + T::one()) * x * p1 - k * p0) / (k + T::one());
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// P_ν(x), x ∈ (−1, 1), from the expansion about x = −1.
///
/// The ψ(k − ν) poles that appear when ν approaches an integer are removed
/// analytically (reflection), so the sum is continuous in ν and reproduces
/// P_n at integer ν. Uses P_ν = P_{−ν−1} to keep Re ν ≥ −½.
pub fn legendre_p<T: Real>(nu: Cx<T>, x: T) -> Result<Cx<T>> {
    if !(x > -T::one() && x < T::one()) {
        return Err(Error::Argument(format!("legendre_p needs x in (-1, 1), got {x}")));
    }
    let one = re(T::one());
    let nu = if nu.re < T::lit(-0.5) { -nu - one } else { nu };
    let w = (T::one() + x) * T::lit(0.5);
    let lw = w.ln();
    // S = 1/(Γ(−ν)Γ(1+ν)) = −sin(πν)/π
    let s = -sin_pi(nu) / T::PI();
    let cos_nu = cos_pi(nu);
    let mut poch_minus = one; // (−ν)_k
    let mut poch_plus = one; // (1+ν)_k
    let mut kfact_sq = T::one();
    let mut wk = T::one();
    let mut psi_k1 = -T::euler_gamma(); // ψ(1 + k)
    let mut sum = re(T::zero());
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let kk = T::from_usize(k).unwrap();
        let coef = poch_plus / kfact_sq * wk;
        let regular = s * poch_minus * (re(psi_k1 * T::lit(2.0) - lw) - digamma(nu + kk + T::one())?);
        let reflect = (re(kk) - nu).re < T::lit(0.5);
        // −S·(−ν)_k·ψ(k − ν), pole-free form
        let q = if reflect {
            -(poch_minus * (s * digamma(nu - kk + T::one())? - cos_nu))
        } else {
            -(s * poch_minus * digamma(re(kk) - nu)?)
        };
        let term = coef * (regular + q);
        sum = sum + term;
        if norm1(term) <= T::lit(1e-17) * norm1(sum) && kk > nu.norm() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
        poch_minus = poch_minus * (re(kk) - nu);
        poch_plus = poch_plus * (nu + kk + T::one());
        kfact_sq = kfact_sq * (kk + T::one()) * (kk + T::one());
        wk = wk * w;
        psi_k1 = psi_k1 + (kk + T::one()).recip();
    }
    Err(Error::Series { what: "legendre_p", terms: MAX_TERMS })
}

/// Leading behaviour of P_ν near −1:
/// π⁻¹ sin(νπ)[ln((1+x)/2) + 2γ_E + 2ψ(1+ν)] + cos(νπ).
pub fn legendre_p_near_minus_one<T: Real>(nu: Cx<T>, x: T) -> Result<Cx<T>> {
    let lw = re(((T::one() + x) * T::lit(0.5)).ln());
    let bracket = lw + re(T::lit(2.0) * T::euler_gamma()) + digamma(nu + T::one())? * T::lit(2.0);
    Ok(sin_pi(nu) / T::PI() * bracket + cos_pi(nu))
}

/// Helper used for complex literals in tests and oracles.
#[allow(dead_code)]
pub(crate) fn c<T: Real>(a: f64, b: f64) -> Cx<T> {
    cx(T::lit(a), T::lit(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Cx<f64>, b: Cx<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn gamma_classical_values() {
        let sp = std::f64::consts::PI.sqrt();
        assert!(close(gamma_fn(c(0.5, 0.0)).unwrap(), c(sp, 0.0), 1e-14));
        assert!(close(gamma_fn(c(-0.5, 0.0)).unwrap(), c(-2.0 * sp, 0.0), 1e-14));
        assert!(close(gamma_fn(c(10.0, 0.0)).unwrap(), c(362880.0, 0.0), 1e-13));
        // Γ(1+i) = 0.49801566811835604271 − 0.15494982830181068512i
        assert!(close(gamma_fn(c(1.0, 1.0)).unwrap(), c(0.498_015_668_118_356_04, -0.154_949_828_301_810_69), 1e-13));
        // Γ(30.5 − 12i)
        let g = gamma_fn(c(30.5, -12.0)).unwrap();
        let expect = c(-4.466_710_186_338_244_3e30, 1.283_717_199_898_138_7e30);
        assert!(close(g, expect, 1e-12), "{g}");
        assert!(matches!(gamma_fn(c::<f64>(-3.0, 0.0)), Err(Error::Pole(_))));
        assert_eq!(rgamma(c::<f64>(-3.0, 0.0)).norm(), 0.0);
    }

    #[test]
    fn digamma_values() {
        assert!(close(digamma(c(1.0, 0.0)).unwrap(), c(-0.577_215_664_901_532_9, 0.0), 1e-14));
        // ψ(−0.3) = 2.1133097796353989
        assert!(close(digamma(c(-0.3, 0.0)).unwrap(), c(2.113_309_779_635_398_9, 0.0), 1e-13));
        // ψ(2 + 3i) = 1.2079807107101509 + 1.1041296805875762i
        assert!(close(digamma(c(2.0, 3.0)).unwrap(), c(1.207_980_710_710_150_9, 1.104_129_680_587_576_2), 1e-13));
        assert!(matches!(digamma(c::<f64>(0.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn bessel_half_order() {
        let v = bessel_j(0.5f64, 1.0).unwrap();
        assert!((v - 0.671_396_707_141_803_1).abs() < 1e-15);
        let x: f64 = 7.5;
        let expect = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin();
        assert!((bessel_j(0.5, x).unwrap() - expect).abs() < 1e-13);
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn kummer_basics() {
        assert_eq!(kummer_f(c(0.3, 0.2), c(1.7, 0.0), 0.0).unwrap(), c(1.0, 0.0));
        // F(a, a; x) = e^x
        let f = kummer_f(c(0.7, 0.0), c(0.7, 0.0), 3.0).unwrap();
        assert!(close(f, c(3f64.exp(), 0.0), 1e-14));
        // terminating: F(−2, 1; x) = 1 − 2x + x²/2 = L_2
        let f = kummer_f(c(-2.0, 0.0), c(1.0, 0.0), 1.5).unwrap();
        assert!(close(f, c(1.0 - 3.0 + 1.125, 0.0), 1e-14));
        // F(−0.5, 0.5; 30) = −187858069514.0468…
        let f = kummer_f(c(-0.5, 0.0), c(0.5, 0.0), 30.0).unwrap();
        assert!(close(f, c(-187_858_069_514.046_8, 0.0), 1e-12), "{f}");
    }

    #[test]
    fn legendre_integer_orders() {
        assert!(close(legendre_p(c(1.0, 0.0), 0.3).unwrap(), c(0.3, 0.0), 1e-14));
        for n in 0..6 {
            for &x in &[-0.9, -0.2, 0.0, 0.4, 0.8] {
                let v = legendre_p(c(n as f64, 0.0), x).unwrap();
                assert!((v - c(legendre_poly(n, x), 0.0)).norm() < 1e-12, "n={n} x={x} {v}");
                let v = legendre_p(c(-(n as f64) - 1.0, 0.0), x).unwrap();
                assert!((v.re - legendre_poly(n, x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn legendre_noninteger_reference() {
        // P_{0.3+0.4i}(0.25) = 0.87392116446551971 − 0.28499488202608583i
        let v = legendre_p(c(0.3, 0.4), 0.25).unwrap();
        assert!(close(v, c(0.873_921_164_465_519_71, -0.284_994_882_026_085_83), 1e-12), "{v}");
    }

    #[test]
    fn legendre_asymptotics_near_minus_one() {
        let nu = c(0.37, 0.21);
        let x = -1.0 + 1e-7;
        let full = legendre_p(nu, x).unwrap();
        let lead = legendre_p_near_minus_one(nu, x).unwrap();
        assert!((full - lead).norm() < 1e-5, "{full} vs {lead}");
    }

    #[test]
    fn f32_gamma() {
        let g = gamma_fn(Complex::new(0.5f32, 0.0)).unwrap();
        assert!((g.re - std::f32::consts::PI.sqrt()).abs() < 1e-5);
    }
}
