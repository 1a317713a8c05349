//! Principal and nonprincipal solutions at an endpoint.

use crate::classifier::{is_nonoscillatory, ClassifierConfig};
use crate::error::{Error, Result};
use crate::integrator::{drive, IntegratorConfig, Standard};
use crate::model::{wronskian, Bound, Side, SlProblem, SolutionState};
use crate::oracles::catalog;
use crate::quadrature::{
    gk15_nodes, integrate_adaptive, integrate_to_endpoint, tail_estimate, ImproperConfig, Improper, QuadConfig,
};
use crate::scalar::{norm1, re, Cx, Real};
use crate::solution::{HopFrom, Integrated, Solution, SolutionHandle};

/// Normalized pair (u_d, û_d) at an endpoint with W(û, u) = 1.
#[derive(Debug, Clone)]
pub struct ReferenceBasis<T: Real> {
    pub side: Side,
    pub endpoint: Bound<T>,
    pub lambda0: T,
    pub principal: SolutionHandle<T>,
    pub nonprincipal: SolutionHandle<T>,
    /// W(û, u) measured at `reach`.
    pub normalization_check: Cx<T>,
    /// Interior point up to which the pair is meant to be used.
    pub reach: T,
    /// How the free "+ c·u" part of û was fixed.
    pub convention: String,
}

impl<T: Real> ReferenceBasis<T> {
    /// Assemble and check a basis from two handles.
    pub fn new(
        side: Side,
        endpoint: Bound<T>,
        lambda0: T,
        principal: SolutionHandle<T>,
        nonprincipal: SolutionHandle<T>,
        reach: T,
        convention: impl Into<String>,
    ) -> Result<Self> {
        let w = wronskian(&nonprincipal.eval(reach)?, &principal.eval(reach)?)?;
        if (w - T::one()).norm() > T::lit(1e-8) {
            return Err(Error::Argument(format!("basis normalization W(û,u) = {w}, expected 1")));
        }
        Ok(ReferenceBasis {
            side,
            endpoint,
            lambda0,
            principal,
            nonprincipal,
            normalization_check: w,
            reach,
            convention: convention.into(),
        })
    }

    pub fn normalization(&self) -> Cx<T> {
        self.normalization_check
    }

    /// Finite endpoint coordinate, if any.
    pub fn endpoint_value(&self) -> Option<T> {
        self.endpoint.finite()
    }

    /// Points d ∓ ε₀·2^{−k}, k = 0..=k_max, approaching the endpoint from `reach`
    /// (or x₀·2^k toward an infinite endpoint).
    pub fn probe_points(&self, eps0: T, k_max: usize) -> Vec<T> {
        let two = T::lit(2.0);
        (0..=k_max)
            .map(|k| {
                let f = two.powi(-(k as i32));
                match (self.endpoint, self.side) {
                    (Bound::Finite(d), Side::Left) => d + eps0 * f,
                    (Bound::Finite(d), Side::Right) => d - eps0 * f,
                    (_, Side::Left) => self.reach - eps0 / f,
                    (_, Side::Right) => self.reach + eps0 / f,
                }
            })
            .collect()
    }

    /// Checks W(û,u) = 1 and the decay of u/û along `points`.
    pub fn verify(&self, points: &[T]) -> Result<T> {
        let mut worst = T::zero();
        let mut prev = T::infinity();
        for &x in points {
            let (uh, u) = (self.nonprincipal.eval(x)?, self.principal.eval(x)?);
            let w = wronskian(&uh, &u)?;
            worst = worst.max((w - T::one()).norm());
            let ratio = (u.u / uh.u).norm();
            if ratio > prev * (T::one() + T::lit(1e-9)) {
                return Err(Error::Argument(format!("u/û does not decrease toward the endpoint at x = {x}")));
            }
            prev = ratio;
        }
        if worst > T::lit(1e-8) {
            return Err(Error::Argument(format!("W(û,u) deviates from 1 by {worst}")));
        }
        Ok(worst)
    }
}

/// û(x) = u(x)·∫ p⁻¹u⁻² between x and c, oriented ∫_x^c at a left endpoint
/// and ∫_c^x at a right one.
pub fn nonprincipal_from_solution<T: Real>(
    problem: &SlProblem<T>,
    _lambda0: T,
    u: &SolutionHandle<T>,
    side: Side,
    c: T,
) -> Result<SolutionHandle<T>> {
    problem.check_interior(c)?;
    let uc = u.eval(c)?;
    if uc.u == re(T::zero()) {
        return Err(Error::Domain { x: c.as_f64(), a: problem.a.as_f64(), b: problem.b.as_f64() });
    }
    let (lo, hi) = u.range();
    Ok(SolutionHandle::new(Reduction {
        problem: problem.clone(),
        base: u.clone(),
        kind: ReductionKind::Nonprincipal { c, side, sign_ref: uc.u },
        lo,
        hi,
    }))
}

/// u(x) = û(x)·∫_d^x p⁻¹û⁻² (oriented from the endpoint), so that W(û, u) = 1.
pub fn principal_from_nonprincipal<T: Real>(
    problem: &SlProblem<T>,
    _lambda0: T,
    uh: &SolutionHandle<T>,
    side: Side,
) -> Result<SolutionHandle<T>> {
    let (lo, hi) = uh.range();
    let h = SolutionHandle::new(Reduction {
        problem: problem.clone(),
        base: uh.clone(),
        kind: ReductionKind::Principal { endpoint: problem.endpoint(side) },
        lo,
        hi,
    });
    // fail early when the endpoint integral diverges
    let span = (hi - lo).min(T::lit(4.0)) * T::lit(0.25);
    let probe = match side {
        Side::Left if lo.is_finite() => lo + span,
        Side::Right if hi.is_finite() => hi - span,
        _ => T::zero().max(lo).min(hi),
    };
    if problem.contains(probe) && probe > lo && probe < hi {
        h.eval(probe)?;
    }
    Ok(h)
}

enum ReductionKind<T: Real> {
    Nonprincipal { c: T, side: Side, sign_ref: Cx<T> },
    Principal { endpoint: Bound<T> },
}

struct Reduction<T: Real> {
    problem: SlProblem<T>,
    base: SolutionHandle<T>,
    kind: ReductionKind<T>,
    lo: T,
    hi: T,
}

impl<T: Real> Reduction<T> {
    fn integrand(&self, t: T, sign_ref: Option<Cx<T>>) -> Result<Cx<T>> {
        let s = self.base.eval(t)?;
        if let Some(r) = sign_ref {
            // a real solution changing sign has a zero in between
            if r.im == T::zero() && s.u.im.abs() <= T::lit(1e-12) * s.u.re.abs() && s.u.re * r.re <= T::zero() {
                return Err(Error::Domain { x: t.as_f64(), a: self.lo.as_f64(), b: self.hi.as_f64() });
            }
        }
        if s.u == re(T::zero()) {
            return Err(Error::Domain { x: t.as_f64(), a: self.lo.as_f64(), b: self.hi.as_f64() });
        }
        Ok((s.u * s.u).inv() / self.problem.p(t)?)
    }
}

impl<T: Real> Solution<T> for Reduction<T> {
    fn eval(&self, x: T) -> Result<SolutionState<T>> {
        let s = self.base.eval(x)?;
        match self.kind {
            ReductionKind::Nonprincipal { c, side, sign_ref } => {
                let cfg = QuadConfig::default();
                let (from, to) = match side {
                    Side::Left => (x, c),
                    Side::Right => (c, x),
                };
                let i = integrate_adaptive(|t| self.integrand(t, Some(sign_ref)), from, to, &cfg)?.value;
                let inv = s.u.inv();
                let u1 = match side {
                    Side::Left => s.u1 * i - inv,
                    Side::Right => s.u1 * i + inv,
                };
                Ok(SolutionState::new(x, s.u * i, u1))
            }
            ReductionKind::Principal { endpoint } => {
                let cfg = ImproperConfig::default();
                match integrate_to_endpoint(|t| self.integrand(t, None), endpoint, x, &cfg)? {
                    Improper::Converged(r) => {
                        let j = r.value;
                        Ok(SolutionState::new(x, s.u * j, s.u1 * j + s.u.inv()))
                    }
                    Improper::Divergent { .. } => Err(Error::Divergence(
                        "∫ p⁻¹û⁻² diverges at the endpoint: input is not nonprincipal".into(),
                    )),
                }
            }
        }
    }
    fn range(&self) -> (T, T) {
        (self.lo, self.hi)
    }
    fn z(&self) -> Cx<T> {
        self.base.z()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BasisConfig<T> {
    pub integrator: IntegratorConfig<T>,
    /// Distance from the endpoint to the anchor; `None` picks one from the interval.
    pub anchor_distance: Option<T>,
    pub max_panels: usize,
    /// Use closed forms from the catalog when the problem carries a catalog tag.
    pub use_catalog: bool,
}

impl<T: Real> Default for BasisConfig<T> {
    fn default() -> Self {
        BasisConfig {
            integrator: IntegratorConfig::with_tolerances(T::lit(1e-12).max(T::epsilon() * T::lit(64.0)), T::lit(1e-14).max(T::epsilon() * T::lit(8.0))),
            anchor_distance: None,
            max_panels: 200,
            use_catalog: true,
        }
    }
}

/// Normalized principal/nonprincipal pair at `side` for λ0 below the spectrum.
pub fn build_reference_basis<T: Real>(
    problem: &SlProblem<T>,
    lambda0: T,
    side: Side,
    cfg: &BasisConfig<T>,
) -> Result<ReferenceBasis<T>> {
    if cfg.use_catalog {
        if let Some(b) = catalog::closed_basis(problem, lambda0, side)? {
            return Ok(b);
        }
    }
    let d = problem
        .endpoint(side)
        .finite()
        .ok_or_else(|| Error::Unsupported("numeric bases at infinite endpoints".into()))?;
    let toward = match side {
        Side::Left => T::one(),
        Side::Right => -T::one(),
    };
    let span = if problem.length().is_finite() { problem.length() * T::lit(0.25) } else { T::lit(0.5) };
    let mut dist = cfg.anchor_distance.unwrap_or(span.min(T::lit(0.5)));

    let ccfg = ClassifierConfig::default();
    if !is_nonoscillatory(problem, side, lambda0, &ccfg)? {
        return Err(Error::Oscillatory(lambda0.as_f64()));
    }
    let mut last_err = None;
    for _ in 0..4 {
        match numeric_basis(problem, lambda0, side, d, d + toward * dist, cfg) {
            Ok(b) => return Ok(b),
            Err(e @ Error::Divergence(_)) | Err(e @ Error::Domain { .. }) => {
                last_err = Some(e);
                dist = dist * T::lit(0.5);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

/// û is the solution vanishing at the anchor c (u·∫_x^c p⁻¹u⁻² for any y with
/// y(c) ≠ 0 has exactly these data); u = û·∫_d^x p⁻¹û⁻² is accumulated over
/// halving panels along one continuous integration of û toward d.
fn numeric_basis<T: Real>(
    problem: &SlProblem<T>,
    lambda0: T,
    side: Side,
    d: T,
    c: T,
    cfg: &BasisConfig<T>,
) -> Result<ReferenceBasis<T>> {
    let half = T::lit(0.5);
    let z = re(lambda0);
    let sys = Standard { problem, z, fraction: cfg.integrator.endpoint_fraction };
    let mut y = match side {
        Side::Left => [re(T::zero()), re(-T::one())],
        Side::Right => [re(T::zero()), re(T::one())],
    };
    let x1 = d + (c - d) * half;
    y = drive(&sys, c, y, &[x1], &cfg.integrator, |_, _, _| {})?;

    let mut grid: Vec<SolutionState<T>> = vec![SolutionState::new(x1, y[0], y[1])];
    let mut panels: Vec<Cx<T>> = Vec::new();
    let mut total = re(T::zero());
    let mut small = 0;
    let mut outer = x1;
    let resolution = T::lit(64.0) * T::epsilon() * T::one().max(d.abs());
    for _ in 0..cfg.max_panels {
        let inner = d + (outer - d) * half;
        if (inner - d).abs() <= resolution {
            break;
        }
        // gk15_nodes lists nodes from `inner` to `outer`; travel the other way
        let mut nodes = gk15_nodes(inner, outer);
        nodes.reverse();
        let mut targets: Vec<T> = nodes.iter().map(|n| n.0).collect();
        targets.push(inner);
        let mut at = Vec::with_capacity(16);
        let cur = grid.last().unwrap();
        let yend = drive(&sys, outer, [cur.u, cur.u1], &targets, &cfg.integrator, |x, v, hit| {
            if hit {
                at.push((x, v[0]));
            }
        })?;
        let mut pk = re(T::zero());
        for (i, (x, w)) in nodes.iter().enumerate() {
            let (xa, ua) = at[i];
            debug_assert!(xa == *x);
            // weights from gk15_nodes are for ∫_inner^outer
            pk = pk + (ua * ua).inv() * (*w / problem.p(xa)?);
        }
        if !(pk.re.is_finite() && pk.im.is_finite()) {
            return Err(Error::Domain { x: inner.as_f64(), a: problem.a.as_f64(), b: problem.b.as_f64() });
        }
        panels.push(pk);
        total = total + pk;
        grid.push(SolutionState::new(inner, yend[0], yend[1]));
        outer = inner;
        if norm1(pk) <= T::lit(1e-15) * norm1(total) {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
        let n = panels.len();
        if n >= 12 && panels[n - 7..].windows(2).all(|w| norm1(w[1]) >= T::lit(0.999) * norm1(w[0])) {
            return Err(Error::Divergence("anchor solution is principal; moving anchor".into()));
        }
    }
    let tail = if small >= 3 || panels.len() < 3 {
        re(T::zero())
    } else {
        tail_estimate(&panels).ok_or_else(|| Error::Divergence("endpoint integral of p⁻¹û⁻² diverges".into()))?
    };
    // J(grid[k]) = tail + Σ_{j ≥ k} panels[j]; panels[j] spans grid[j+1]..grid[j]
    let n = panels.len();
    let mut j = vec![tail; n + 1];
    for k in (0..n).rev() {
        j[k] = j[k + 1] + panels[k];
    }
    // orientation: ∫_d^x. For a left endpoint the panel weights already give
    // ∫_inner^outer = ∫ toward x; for a right one inner > outer and the same
    // weights give ∫_inner^outer, again oriented from d.
    let mut uh_states = Vec::with_capacity(n + 1);
    let mut u_states = Vec::with_capacity(n + 1);
    for (k, s) in grid.iter().enumerate() {
        let jk = j[k];
        uh_states.push(*s);
        u_states.push(SolutionState::new(s.x, s.u * jk, s.u1 * jk + s.u.inv()));
    }
    // balance magnitudes at the reach point, keeping W(û,u) = 1
    let scale = (u_states[0].u.norm() / uh_states[0].u.norm()).sqrt();
    let scale = if scale.is_finite() && scale > T::zero() { scale } else { T::one() };
    for s in &mut uh_states {
        *s = s.scale(re(scale));
    }
    for s in &mut u_states {
        *s = s.scale(re(scale.recip()));
    }
    let (lo, hi) = match side {
        Side::Left => (d, x1),
        Side::Right => (x1, d),
    };
    let (hop_uh, hop_u) = match side {
        Side::Left => (HopFrom::Above, HopFrom::Below),
        Side::Right => (HopFrom::Below, HopFrom::Above),
    };
    let eps = T::epsilon() * T::lit(4.0) * T::one().max(x1.abs());
    let (lo, hi) = match side {
        Side::Left => (lo, hi + eps),
        Side::Right => (lo - eps, hi),
    };
    let uh = Integrated::new(problem.clone(), z, uh_states, cfg.integrator)?
        .with_hop(hop_uh)
        .with_range(lo, hi)
        .into_handle();
    let u = Integrated::new(problem.clone(), z, u_states, cfg.integrator)?
        .with_hop(hop_u)
        .with_range(lo, hi)
        .into_handle();
    ReferenceBasis::new(
        side,
        Bound::Finite(d),
        lambda0,
        u,
        uh,
        x1,
        format!("numeric: û vanishes at anchor {c}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn unit_free() -> SlProblem<f64> {
        SlProblem::new(Bound::Finite(0.0), Bound::Finite(1.0), |_| 1.0, |_| 0.0, |_| 1.0).unwrap()
    }

    fn bessel(gamma: f64) -> SlProblem<f64> {
        let c = gamma * gamma - 0.25;
        SlProblem::new(Bound::Finite(0.0), Bound::PosInfinity, |_| 1.0, move |x: f64| c / (x * x), |_| 1.0).unwrap()
    }

    #[test]
    fn nonprincipal_of_linear_function() {
        let p = unit_free();
        let u = SolutionHandle::closed(cx(0.0, 0.0), 0.0, 1.0 + 1e-12, |x| Ok(SolutionState::real(x, x, 1.0)));
        let uh = nonprincipal_from_solution(&p, 0.0, &u, Side::Left, 0.999_999_999).unwrap();
        for x in [0.1, 0.5, 0.9] {
            let s = uh.eval(x).unwrap();
            assert!((s.u.re - (1.0 - x)).abs() < 1e-8, "{s:?}");
            assert!((s.u1.re + 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn nonprincipal_bessel_exponent() {
        let p = bessel(0.3);
        let u = SolutionHandle::closed(cx(0.0, 0.0), 0.0, f64::INFINITY, |x: f64| {
            Ok(SolutionState::real(x, x.powf(0.8), 0.8 * x.powf(-0.2)))
        });
        let uh = nonprincipal_from_solution(&p, 0.0, &u, Side::Left, 1.0).unwrap();
        // u·∫_x^1 t^{-1.6} dt = (x^{0.2} − x^{0.8})/0.6; the x^{0.2} part dominates
        for x in [1e-3, 0.2] {
            let s = uh.eval(x).unwrap();
            let expect = (x.powf(0.2) - x.powf(0.8)) / 0.6;
            assert!((s.u.re - expect).abs() < 1e-10 * expect.abs());
        }
    }

    #[test]
    fn nonprincipal_legendre_log() {
        let p = SlProblem::new(Bound::Finite(-1.0), Bound::Finite(1.0), |x: f64| (1.0 - x) * (1.0 + x), |_| 0.0, |_| 1.0)
            .unwrap();
        let one = SolutionHandle::closed(cx(0.0, 0.0), -1.0, 1.0, |x| Ok(SolutionState::real(x, 1.0, 0.0)));
        let uh = nonprincipal_from_solution(&p, 0.0, &one, Side::Left, 0.0).unwrap();
        for x in [-0.999f64, -0.5, 0.3] {
            let expect = 0.5 * ((1.0 - x) / (1.0 + x)).ln();
            assert!((uh.eval(x).unwrap().u.re - expect).abs() < 1e-11);
        }
    }

    #[test]
    fn zero_in_range_is_rejected() {
        let p = unit_free();
        let u = SolutionHandle::closed(cx(0.0, 0.0), 0.0, 1.0, |x| Ok(SolutionState::real(x, x - 0.5, 1.0)));
        let uh = nonprincipal_from_solution(&p, 0.0, &u, Side::Left, 0.9).unwrap();
        assert!(uh.eval(0.2).is_err());
    }

    #[test]
    fn principal_from_constant() {
        let p = unit_free();
        let one = SolutionHandle::closed(cx(0.0, 0.0), 0.0, 1.0, |x| Ok(SolutionState::real(x, 1.0, 0.0)));
        let u = principal_from_nonprincipal(&p, 0.0, &one, Side::Left).unwrap();
        let s = u.eval(0.3).unwrap();
        assert!((s.u.re - 0.3).abs() < 1e-12 && (s.u1.re - 1.0).abs() < 1e-12);
        let ur = principal_from_nonprincipal(&p, 0.0, &one, Side::Right).unwrap();
        let s = ur.eval(0.25).unwrap();
        assert!((s.u.re + 0.75).abs() < 1e-12);
    }

    #[test]
    fn principal_bessel_and_divergence() {
        let p = bessel(0.3);
        let uh = SolutionHandle::closed(cx(0.0, 0.0), 0.0, f64::INFINITY, |x: f64| {
            Ok(SolutionState::real(x, x.powf(0.2) / 0.6, (0.2 / 0.6) * x.powf(-0.8)))
        });
        let u = principal_from_nonprincipal(&p, 0.0, &uh, Side::Left).unwrap();
        for x in [1e-4, 0.05, 0.7] {
            let s = u.eval(x).unwrap();
            assert!((s.u.re - x.powf(0.8)).abs() < 1e-9 * x.powf(0.8), "{x}: {s:?}");
        }
        // feeding the principal solution back diverges
        let wrong = SolutionHandle::closed(cx(0.0, 0.0), 0.0, f64::INFINITY, |x: f64| {
            Ok(SolutionState::real(x, x.powf(0.8), 0.8 * x.powf(-0.2)))
        });
        let r = principal_from_nonprincipal(&p, 0.0, &wrong, Side::Left);
        assert!(matches!(r, Err(Error::Divergence(_))), "{r:?}");
    }

    #[test]
    fn numeric_basis_regular_problem() {
        let p = unit_free();
        let cfg = BasisConfig::default();
        let b = build_reference_basis(&p, -1.0, Side::Left, &cfg).unwrap();
        assert!((b.normalization() - 1.0).norm() < 1e-10);
        // principal at a regular endpoint vanishes there: u ∝ sinh(x)
        let pts = b.probe_points(0.1, 12);
        b.verify(&pts).unwrap();
        let s1 = b.principal.eval(0.05).unwrap();
        let s2 = b.principal.eval(0.1).unwrap();
        let ratio = s1.u.re / s2.u.re;
        assert!((ratio - 0.05f64.sinh() / 0.1f64.sinh()).abs() < 1e-9, "{ratio}");
    }

    #[test]
    fn oscillatory_reference_value_rejected() {
        let p = SlProblem::new(Bound::Finite(0.0), Bound::PosInfinity, |_| 1.0, |x: f64| -1.0 / (x * x), |_| 1.0).unwrap();
        let r = build_reference_basis(&p, 0.0, Side::Left, &BasisConfig::default());
        assert!(matches!(r, Err(Error::Oscillatory(_))), "{r:?}");
    }
}
