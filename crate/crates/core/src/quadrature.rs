//! Gauss–Kronrod quadrature: adaptive on compact intervals, geometric panels
//! toward singular endpoints.

use crate::error::{Error, Result};
use crate::model::Bound;
use crate::scalar::{norm1, Cx, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// The 15 Kronrod nodes and weights mapped to [a, b], in increasing order.
pub fn gk15_nodes<T: Real>(a: T, b: T) -> [(T, T); 15] {
    let c = (a + b) * T::lit(0.5);
    let h = (b - a) * T::lit(0.5);
    let mut out = [(T::zero(), T::zero()); 15];
    for i in 0..7 {
        let dx = h * T::lit(XGK[i]);
        let w = h * T::lit(WGK[i]);
        out[i] = (c - dx, w);
        out[14 - i] = (c + dx, w);
    }
    out[7] = (c, h * T::lit(WGK[7]));
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T: Real> {
    pub value: Cx<T>,
    pub error: T,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        let floor = T::epsilon() * T::lit(50.0);
        QuadConfig {
            rel_tol: T::lit(1e-12).max(floor),
            abs_tol: T::lit(1e-14).max(floor * floor),
            max_intervals: 500,
        }
    }
}

fn gk15<T, F>(f: &mut F, a: T, b: T) -> Result<(Cx<T>, T)>
where
    T: Real,
    F: FnMut(T) -> Result<Cx<T>>,
{
    let c = (a + b) * T::lit(0.5);
    let h = (b - a) * T::lit(0.5);
    let fc = f(c)?;
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for i in 0..7 {
        let dx = h * T::lit(XGK[i]);
        let s = f(c - dx)? + f(c + dx)?;
        kron = kron + s * T::lit(WGK[i]);
        if i % 2 == 1 {
            gauss = gauss + s * T::lit(WG[i / 2]);
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    Ok((kron, norm1(kron - gauss)))
}

/// Adaptive Gauss–Kronrod (7/15) over [a, b] (either orientation).
pub fn integrate_adaptive<T, F>(mut f: F, a: T, b: T, cfg: &QuadConfig<T>) -> Result<QuadResult<T>>
where
    T: Real,
    F: FnMut(T) -> Result<Cx<T>>,
{
    if a == b {
        return Ok(QuadResult { value: Cx::new(T::zero(), T::zero()), error: T::zero(), evaluations: 0 });
    }
    let mut pieces: Vec<(T, T, Cx<T>, T)> = Vec::new();
    let (v, e) = gk15(&mut f, a, b)?;
    pieces.push((a, b, v, e));
    let mut evals = 15;
    loop {
        let total: Cx<T> = pieces.iter().fold(Cx::new(T::zero(), T::zero()), |s, p| s + p.2);
        let err: T = pieces.iter().map(|p| p.3).fold(T::zero(), |s, e| s + e);
        let target = cfg.abs_tol.max(cfg.rel_tol * norm1(total));
        if err <= target {
            return Ok(QuadResult { value: total, error: err, evaluations: evals });
        }
        if pieces.len() >= cfg.max_intervals {
            return Err(Error::Quadrature(format!(
                "adaptive subdivision exhausted on [{a}, {b}] (error {err}, target {target})"
            )));
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let mid = (lo + hi) * T::lit(0.5);
        if mid == lo || mid == hi {
            return Err(Error::Quadrature(format!("interval collapsed near {mid}")));
        }
        let (v1, e1) = gk15(&mut f, lo, mid)?;
        let (v2, e2) = gk15(&mut f, mid, hi)?;
        evals += 30;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

/// Outcome of a geometric-panel improper quadrature.
#[derive(Debug, Clone, PartialEq)]
pub enum Improper<T: Real> {
    Converged(QuadResult<T>),
    /// Panel contributions stop decaying: the integral diverges.
    Divergent { panels: usize, last_ratio: T },
}

/// Configuration for [`integrate_to_endpoint`].
#[derive(Debug, Clone, Copy)]
pub struct ImproperConfig<T> {
    pub panel: QuadConfig<T>,
    pub rel_tol: T,
    pub max_panels: usize,
}

impl<T: Real> Default for ImproperConfig<T> {
    fn default() -> Self {
        ImproperConfig {
            panel: QuadConfig::default(),
            rel_tol: T::lit(1e-12).max(T::epsilon() * T::lit(50.0)),
            max_panels: 400,
        }
    }
}

/// Oriented integral ∫_d^x f toward an endpoint d, over panels that halve the
/// distance to a finite d or double in width toward ±∞.
pub fn integrate_to_endpoint<T, F>(
    mut f: F,
    endpoint: Bound<T>,
    x: T,
    cfg: &ImproperConfig<T>,
) -> Result<Improper<T>>
where
    T: Real,
    F: FnMut(T) -> Result<Cx<T>>,
{
    let two = T::lit(2.0);
    let d = endpoint.finite();
    let outward = match endpoint {
        Bound::PosInfinity => T::one(),
        _ => -T::one(),
    };
    let unit = T::one().max(x.abs());
    let mut stride = unit;
    let mut contributions: Vec<Cx<T>> = Vec::new();
    let mut total = Cx::new(T::zero(), T::zero());
    let mut err = T::zero();
    let mut evals = 0;
    // panel k covers [lo_k, hi_k] oriented from the endpoint toward x
    let mut outer = x;
    let mut small_run = 0;
    for k in 0..cfg.max_panels {
        let inner = match d {
            Some(d) => d + (outer - d) / two,
            None => {
                let v = outer + outward * stride;
                stride = stride * two;
                v
            }
        };
        if inner == outer || !inner.is_finite() {
            break;
        }
        // ∫_inner^outer, oriented as endpoint → x
        let r = integrate_adaptive(&mut f, inner, outer, &cfg.panel)?;
        evals += r.evaluations;
        let c = r.value;
        total = total + c;
        err = err + r.error;
        contributions.push(c);
        outer = inner;

        if norm1(c) <= cfg.rel_tol * norm1(total) {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 {
            break;
        }
        if k >= 12 && diverging(&contributions) {
            let n = contributions.len();
            return Ok(Improper::Divergent {
                panels: n,
                last_ratio: norm1(contributions[n - 1]) / norm1(contributions[n - 2]),
            });
        }
        if let Some(d) = d {
            let width = (outer - d).abs();
            if width <= T::lit(64.0) * T::epsilon() * T::one().max(d.abs()) {
                break;
            }
        }
    }
    let n = contributions.len();
    if n >= 3 && small_run < 3 {
        match tail_estimate(&contributions) {
            Some(t) => {
                total = total + t;
                err = err + norm1(t) * T::lit(0.1);
            }
            None => {
                return Ok(Improper::Divergent {
                    panels: n,
                    last_ratio: norm1(contributions[n - 1]) / norm1(contributions[n - 2]),
                })
            }
        }
    }
    Ok(Improper::Converged(QuadResult { value: total, error: err, evaluations: evals }))
}

fn diverging<T: Real>(c: &[Cx<T>]) -> bool {
    let n = c.len();
    let tail = &c[n - 7..];
    tail.windows(2).all(|w| norm1(w[1]) >= T::lit(0.999) * norm1(w[0]))
}

/// Remaining sum after the last computed panel: geometric when the panel
/// ratio is clearly below one, power law in the panel index otherwise.
pub(crate) fn tail_estimate<T: Real>(c: &[Cx<T>]) -> Option<Cx<T>> {
    let n = c.len();
    let m2 = norm1(c[n - 3]);
    let m1 = norm1(c[n - 2]);
    let m0 = norm1(c[n - 1]);
    if m0 == T::zero() {
        return Some(Cx::new(T::zero(), T::zero()));
    }
    let rho = (m0 / m1 * m1 / m2).sqrt();
    if rho < T::lit(0.9) {
        return Some(c[n - 1] * (rho / (T::one() - rho)));
    }
    let k = T::from_usize(n).unwrap();
    let s = (m2 / m0).ln() / (k / (k - T::lit(2.0))).ln();
    if !(s > T::lit(1.05)) {
        return None;
    }
    let kh = k + T::lit(0.5);
    let factor = (kh / k).powf(-s) * kh / (s - T::one());
    Some(c[n - 1] * factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;

    #[test]
    fn polynomial_and_oscillatory_integrals() {
        let cfg = QuadConfig::default();
        let r = integrate_adaptive(|x: f64| Ok(re(x * x)), 0.0, 3.0, &cfg).unwrap();
        assert!((r.value.re - 9.0).abs() < 1e-13);
        let r = integrate_adaptive(|x: f64| Ok(re((50.0 * x).sin())), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value.re - (1.0 - 50f64.cos()) / 50.0).abs() < 1e-13);
        let r = integrate_adaptive(|x: f64| Ok(re(x)), 1.0, 0.0, &cfg).unwrap();
        assert!((r.value.re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn node_table_integrates_cubic_exactly() {
        let s: f64 = gk15_nodes(1.0, 2.0).iter().map(|&(x, w)| w * x * x * x).sum();
        assert!((s - 3.75).abs() < 1e-14);
    }

    #[test]
    fn endpoint_power_singularity() {
        let cfg = ImproperConfig::default();
        // ∫_0^1 x^{-1/2} = 2
        match integrate_to_endpoint(|x: f64| Ok(re(x.powf(-0.5))), Bound::Finite(0.0), 1.0, &cfg).unwrap() {
            Improper::Converged(r) => assert!((r.value.re - 2.0).abs() < 1e-10, "{}", r.value),
            other => panic!("{other:?}"),
        }
        // right endpoint: ∫_1^0.5 … oriented from d=1 to x=0.5: ∫_1^{0.5} (1-t)^{-1/2} dt = -2·0.5^{1/2}
        match integrate_to_endpoint(|t: f64| Ok(re((1.0 - t).powf(-0.5))), Bound::Finite(1.0), 0.5, &cfg).unwrap() {
            Improper::Converged(r) => assert!((r.value.re + 2.0 * 0.5f64.sqrt()).abs() < 1e-10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infinite_endpoint() {
        let cfg = ImproperConfig::default();
        // oriented from +∞ to 1: ∫_∞^1 x^{-2} = -1
        match integrate_to_endpoint(|x: f64| Ok(re(x.powi(-2))), Bound::PosInfinity, 1.0, &cfg).unwrap() {
            Improper::Converged(r) => assert!((r.value.re + 1.0).abs() < 1e-10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn log_squared_tail_converges_slowly() {
        // ∫_0^{1/2} dx / (x ln² x) = 1/ln 2
        let cfg = ImproperConfig::default();
        let f = |x: f64| Ok(re(1.0 / (x * x.ln().powi(2))));
        match integrate_to_endpoint(f, Bound::Finite(0.0), 0.5, &cfg).unwrap() {
            Improper::Converged(r) => assert!((r.value.re - 1.0 / 2f64.ln()).abs() < 2e-3, "{}", r.value),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn divergence_is_reported() {
        let cfg = ImproperConfig::default();
        let r = integrate_to_endpoint(|x: f64| Ok(re(1.0 / x)), Bound::Finite(0.0), 1.0, &cfg).unwrap();
        assert!(matches!(r, Improper::Divergent { .. }));
        let r = integrate_to_endpoint(|x: f64| Ok(re(x.powf(-1.5))), Bound::Finite(0.0), 1.0, &cfg).unwrap();
        assert!(matches!(r, Improper::Divergent { .. }));
    }
}
