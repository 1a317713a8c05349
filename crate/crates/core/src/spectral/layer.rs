//! Boundary-layer coordinates and the shooting solution φ_α.

use crate::bvals::extrapolate_limit;
use crate::error::{Error, Result};
use crate::integrator::{drive, integrate, IntegratorConfig, LinearOde, Standard, Vec2};
use crate::model::{wronskian, SlProblem, SolutionState};
use crate::principal::ReferenceBasis;
use crate::scalar::{re, Cx, Real};
use crate::solution::{Integrated, Solution, SolutionHandle};

use super::{SpectralConfig, SpectralSetup};

/// (A, B)′ for A = −W(u, y), B = W(û, y).
pub(crate) struct Layer<'a, T: Real> {
    pub problem: &'a SlProblem<T>,
    pub basis: &'a ReferenceBasis<T>,
    pub mu: Cx<T>,
    pub fraction: T,
}

impl<T: Real> LinearOde<T> for Layer<'_, T> {
    fn rhs(&self, x: T, y: &Vec2<T>) -> Result<Vec2<T>> {
        let r = self.problem.r(x)?;
        let u = self.basis.principal.eval(x)?.u;
        let uh = self.basis.nonprincipal.eval(x)?.u;
        let k = self.mu * r;
        Ok([k * (u * uh * y[0] + u * u * y[1]), -(k * (uh * uh * y[0] + u * uh * y[1]))])
    }

    fn step_ceiling(&self, x: T) -> T {
        self.fraction * self.problem.distance_to_finite_endpoint(x)
    }
}

/// y = B·u + A·û.
pub(crate) fn to_state<T: Real>(basis: &ReferenceBasis<T>, x: T, v: Vec2<T>) -> Result<SolutionState<T>> {
    let (u, uh) = (basis.principal.eval(x)?, basis.nonprincipal.eval(x)?);
    Ok(SolutionState::new(x, v[1] * u.u + v[0] * uh.u, v[1] * u.u1 + v[0] * uh.u1))
}

pub(crate) fn to_layer<T: Real>(basis: &ReferenceBasis<T>, s: &SolutionState<T>) -> Result<Vec2<T>> {
    let (u, uh) = (basis.principal.eval(s.x)?, basis.nonprincipal.eval(s.x)?);
    Ok([-wronskian(&u, s)?, wronskian(&uh, s)?])
}

fn mu_of<T: Real>(basis: &ReferenceBasis<T>, lambda: Cx<T>) -> Cx<T> {
    lambda - re(basis.lambda0)
}

/// Seed points d ± δ_k, δ_k = δ₀·ratio^{−k}, moving toward the endpoint and
/// staying inside the basis handles and above rounding resolution.
fn seed_points<T: Real>(basis: &ReferenceBasis<T>, from: T, cfg: &SpectralConfig<T>) -> Result<Vec<T>> {
    let d = basis
        .endpoint_value()
        .ok_or_else(|| Error::Unsupported("boundary layer at an infinite endpoint".into()))?;
    let (l1, h1) = basis.principal.range();
    let (l2, h2) = basis.nonprincipal.range();
    let (lo, hi) = (l1.max(l2), h1.min(h2));
    let resolution = T::lit(64.0) * T::epsilon() * T::one().max(d.abs());
    let toward = if from > d { T::one() } else { -T::one() };
    let mut delta = (from - d).abs() * cfg.layer_start;
    let mut out = Vec::with_capacity(cfg.layer_levels);
    while out.len() < cfg.layer_levels && delta > resolution {
        let x = d + toward * delta;
        if !(x > lo && x < hi) || x == d {
            break;
        }
        out.push(x);
        delta = delta / cfg.layer_ratio;
    }
    if out.len() < 3 {
        return Err(Error::Divergence("boundary layer: too few seed points inside the basis range".into()));
    }
    Ok(out)
}

fn accept<T: Real>(seq: [Vec<Cx<T>>; 2], noise: Vec<T>, cfg: &SpectralConfig<T>) -> Result<(Vec2<T>, T)> {
    let wrap = |e: Error| Error::Divergence(format!("ε-refinement did not converge: {e}"));
    let a = extrapolate_limit(&seq[0], &noise, 4).map_err(wrap)?;
    let b = extrapolate_limit(&seq[1], &noise, 4).map_err(wrap)?;
    let est = a.estimate.max(b.estimate);
    let scale = T::one().max(a.value.norm()).max(b.value.norm());
    if !(est <= cfg.layer_tol * scale) {
        return Err(Error::Divergence(format!(
            "ε-refinement did not converge: estimate {:.3e} for boundary data ({}, {})",
            est.as_f64(),
            a.value,
            b.value
        )));
    }
    Ok(([a.value, b.value], est))
}

/// (A, B) at the left matching point for the solution whose boundary data at
/// a are `data`, with the extrapolation estimate.
pub(crate) fn left_at_match<T: Real>(
    setup: &SpectralSetup<T>,
    data: Vec2<T>,
    lambda: Cx<T>,
    cfg: &SpectralConfig<T>,
) -> Result<(Vec2<T>, T)> {
    let basis = &setup.basis_a;
    let mu = mu_of(basis, lambda);
    if mu.norm() == T::zero() {
        return Ok((data, T::zero()));
    }
    let pts = seed_points(basis, setup.x_left, cfg)?;
    let sys = Layer { problem: &setup.problem, basis, mu, fraction: cfg.integrator.endpoint_fraction };
    let (zero, one) = (re(T::zero()), re(T::one()));
    // columns of the propagator from the matching point to each seed point
    let mut cols: [Vec<Vec2<T>>; 2] = [Vec::with_capacity(pts.len()), Vec::with_capacity(pts.len())];
    for (j, e) in [[one, zero], [zero, one]].into_iter().enumerate() {
        let col = &mut cols[j];
        drive(&sys, setup.x_left, e, &pts, &cfg.integrator, |_, y, hit| {
            if hit {
                col.push(*y);
            }
        })?;
    }
    let mut seq = [Vec::with_capacity(pts.len()), Vec::with_capacity(pts.len())];
    let mut noise = Vec::with_capacity(pts.len());
    for (c0, c1) in cols[0].iter().zip(&cols[1]) {
        let (p, q, r, s) = (c0[0], c1[0], c0[1], c1[1]);
        let det = p * s - q * r;
        let va = (s * data[0] - q * data[1]) / det;
        let vb = (p * data[1] - r * data[0]) / det;
        let size = (s * data[0]).norm() + (q * data[1]).norm() + (p * data[1]).norm() + (r * data[0]).norm();
        seq[0].push(va);
        seq[1].push(vb);
        noise.push(cfg.noise * size / det.norm());
    }
    accept(seq, noise, cfg)
}

/// Boundary data at b of the solution with state `s` at the right matching
/// point.
pub(crate) fn right_limit<T: Real>(
    setup: &SpectralSetup<T>,
    s: &SolutionState<T>,
    lambda: Cx<T>,
    cfg: &SpectralConfig<T>,
) -> Result<(Vec2<T>, T)> {
    let basis = setup
        .basis_b
        .as_ref()
        .ok_or_else(|| Error::Unsupported("right boundary data at a limit-point endpoint".into()))?;
    let v0 = to_layer(basis, s)?;
    let mu = mu_of(basis, lambda);
    if mu.norm() == T::zero() {
        return Ok((v0, T::zero()));
    }
    let pts = seed_points(basis, s.x, cfg)?;
    let sys = Layer { problem: &setup.problem, basis, mu, fraction: cfg.integrator.endpoint_fraction };
    let mut seq = [Vec::with_capacity(pts.len()), Vec::with_capacity(pts.len())];
    let mut noise = Vec::with_capacity(pts.len());
    drive(&sys, s.x, v0, &pts, &cfg.integrator, |_, y, hit| {
        if hit {
            seq[0].push(y[0]);
            seq[1].push(y[1]);
            noise.push(cfg.noise * (y[0].norm() + y[1].norm() + v0[0].norm() + v0[1].norm()));
        }
    })?;
    accept(seq, noise, cfg)
}

/// Standard integration of a state to `to` (no-op when already there).
pub(crate) fn advance<T: Real>(
    problem: &SlProblem<T>,
    z: Cx<T>,
    s: &SolutionState<T>,
    to: T,
    cfg: &IntegratorConfig<T>,
) -> Result<SolutionState<T>> {
    if s.x == to {
        return Ok(*s);
    }
    let sys = Standard { problem, z, fraction: cfg.endpoint_fraction };
    let y = drive(&sys, s.x, [s.u, s.u1], &[to], cfg, |_, _, _| {})?;
    Ok(SolutionState::new(to, y[0], y[1]))
}

/// A solution inside a boundary layer, stored as (A, B) states and evaluated
/// by short hops of the layer system.
struct LayerSolution<T: Real> {
    problem: SlProblem<T>,
    basis: ReferenceBasis<T>,
    z: Cx<T>,
    states: Vec<(T, Vec2<T>)>,
    cfg: IntegratorConfig<T>,
    lo: T,
    hi: T,
}

impl<T: Real> LayerSolution<T> {
    fn new(
        problem: &SlProblem<T>,
        basis: &ReferenceBasis<T>,
        z: Cx<T>,
        x0: T,
        v0: Vec2<T>,
        toward: T,
        cfg: &IntegratorConfig<T>,
    ) -> Result<Self> {
        let sys = Layer { problem, basis, mu: mu_of(basis, z), fraction: cfg.endpoint_fraction };
        let mut states = vec![(x0, v0)];
        drive(&sys, x0, v0, &[toward], cfg, |x, y, _| states.push((x, *y)))?;
        states.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let d = basis.endpoint_value().unwrap_or(toward);
        let (lo, hi) = if d < x0 { (d, x0) } else { (x0, d) };
        Ok(LayerSolution { problem: problem.clone(), basis: basis.clone(), z, states, cfg: *cfg, lo, hi })
    }
}

impl<T: Real> Solution<T> for LayerSolution<T> {
    fn eval(&self, x: T) -> Result<SolutionState<T>> {
        let i = self.states.partition_point(|s| s.0 < x);
        let below = i.checked_sub(1).map(|k| self.states[k]);
        let above = self.states.get(i).copied();
        let (x0, v0) = match (below, above) {
            (Some(b), Some(a)) => {
                if x - b.0 <= a.0 - x {
                    b
                } else {
                    a
                }
            }
            (Some(b), None) => b,
            (None, Some(a)) => a,
            (None, None) => unreachable!("layer states are never empty"),
        };
        let v = if x0 == x {
            v0
        } else {
            let sys = Layer { problem: &self.problem, basis: &self.basis, mu: mu_of(&self.basis, self.z), fraction: self.cfg.endpoint_fraction };
            drive(&sys, x0, v0, &[x], &self.cfg, |_, _, _| {})?
        };
        to_state(&self.basis, x, v)
    }
    fn range(&self) -> (T, T) {
        (self.lo, self.hi)
    }
    fn z(&self) -> Cx<T> {
        self.z
    }
}

/// φ_α(λ, ·): boundary data (g̃, g̃′)(a) = (−sin α, cos α).
pub fn shoot_left<T: Real>(setup: &SpectralSetup<T>, alpha: T, lambda: Cx<T>, cfg: &SpectralConfig<T>) -> Result<SolutionHandle<T>> {
    shoot_with_data(setup, [re(-alpha.sin()), re(alpha.cos())], lambda, cfg)
}

/// The solution with boundary data `data` = (g̃(a), g̃′(a)), as a handle on
/// (a, x_right] (limit-circle b: all of (a, b); limit-point b: up to X₀).
pub fn shoot_with_data<T: Real>(
    setup: &SpectralSetup<T>,
    data: Vec2<T>,
    lambda: Cx<T>,
    cfg: &SpectralConfig<T>,
) -> Result<SolutionHandle<T>> {
    let icfg = &cfg.integrator;
    let problem = &setup.problem;
    let (v, _) = left_at_match(setup, data, lambda, cfg)?;
    let xl = setup.x_left;
    let seeds = seed_points(&setup.basis_a, xl, cfg)?;
    let left = LayerSolution::new(problem, &setup.basis_a, lambda, xl, v, *seeds.last().unwrap(), icfg)?;
    let sl = to_state(&setup.basis_a, xl, v)?;

    let end = match &setup.basis_b {
        Some(_) => setup.x_right,
        None => setup.truncation_points(cfg)[0],
    };
    let mut pieces = vec![SolutionHandle::new(left)];
    let mut breaks = Vec::new();
    let mut sr = sl;
    if end > xl {
        let t = integrate(problem, lambda, &sl, end, icfg)?;
        sr = *t.last();
        breaks.push(xl);
        pieces.push(Integrated::new(problem.clone(), lambda, t.states, *icfg)?.into_handle());
    }
    if let Some(bb) = &setup.basis_b {
        let vr = to_layer(bb, &sr)?;
        let seeds = seed_points(bb, sr.x, cfg)?;
        breaks.push(sr.x);
        pieces.push(SolutionHandle::new(LayerSolution::new(problem, bb, lambda, sr.x, vr, *seeds.last().unwrap(), icfg)?));
    }
    SolutionHandle::piecewise(pieces, breaks)
}
