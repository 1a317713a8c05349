//! Generalized boundary values g̃(d) = −W(u_d, g)(d), g̃′(d) = W(û_d, g)(d).

use crate::error::{Error, Result};
use crate::integrator::{drive, IntegratorConfig, Standard};
use crate::model::{wronskian, Bound, Side, SlProblem, SolutionState};
use crate::principal::ReferenceBasis;
use crate::scalar::{re, Cx, Real};
use crate::solution::{HopFrom, Integrated, SolutionHandle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Wronskian,
    Quotient,
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryValuePair<T> {
    pub side: Side,
    pub g_tilde: Cx<T>,
    pub g_tilde_prime: Cx<T>,
    pub route: Route,
    /// Size of the last accepted extrapolation correction plus rounding noise.
    pub convergence_estimate: T,
}

#[derive(Debug, Clone, Copy)]
pub struct LimitConfig<T> {
    /// Initial offset ε₀; `None` uses min(1, b − a)/8, capped by the basis reach.
    pub eps0: Option<T>,
    /// Probe points d ∓ ε₀·2^{−k}, k = 0..=k_max.
    pub k_max: usize,
    /// Relative rounding level of g (and the basis) evaluations.
    pub noise: T,
    /// Residual increasing over this many consecutive k means divergence.
    pub divergence_run: usize,
    /// Quotient route for g̃′ only uses points with |u/û| above this.
    pub min_ratio: T,
}

impl<T: Real> Default for LimitConfig<T> {
    fn default() -> Self {
        LimitConfig {
            eps0: None,
            k_max: 24,
            noise: T::epsilon() * T::lit(64.0),
            divergence_run: 4,
            min_ratio: T::lit(1e-7),
        }
    }
}

/// One extrapolated limit.
#[derive(Debug, Clone, Copy)]
pub struct Limit<T> {
    pub value: Cx<T>,
    pub estimate: T,
}

fn aitken_level<T: Real>(s: &[Cx<T>], noise: &[T]) -> (Vec<Cx<T>>, Vec<T>) {
    let mut out = Vec::with_capacity(s.len());
    let mut nout = Vec::with_capacity(s.len());
    for k in 0..s.len() {
        if k < 2 {
            out.push(s[k]);
            nout.push(noise[k]);
            continue;
        }
        let d1 = s[k - 1] - s[k - 2];
        let d2 = s[k] - s[k - 1];
        let n = noise[k] + noise[k - 1] + noise[k - 2];
        if d2.norm() <= T::lit(4.0) * n {
            // converged to rounding level
            out.push(s[k]);
            nout.push(n);
            continue;
        }
        let dd = d2 - d1;
        if dd.norm() <= T::lit(4.0) * n || d1.norm() <= T::lit(4.0) * n {
            out.push(s[k]);
            nout.push(n + d2.norm());
            continue;
        }
        // fitted ratio ρ = Δ_k/Δ_{k−1} ≈ 2^{−θ}; s_∞ = s_k + Δ_k ρ/(1 − ρ)
        let rho = d2 / d1;
        let one = re(T::one());
        let amp = (one - rho).norm().recip();
        out.push(s[k] + d2 * rho / (one - rho));
        nout.push(n * (T::one() + T::lit(2.0) * amp));
    }
    (out, nout)
}

/// Extrapolate s_k → s_∞ (iterated Aitken with fitted ratio); `noise` is the
/// rounding uncertainty of each s_k.
pub fn extrapolate_limit<T: Real>(s: &[Cx<T>], noise: &[T], divergence_run: usize) -> Result<Limit<T>> {
    let n = s.len();
    if n == 0 {
        return Err(Error::Argument("empty sequence".into()));
    }
    if n < 3 {
        let v = s[n - 1];
        let e = if n == 2 { (s[1] - s[0]).norm() } else { T::infinity() };
        return Ok(Limit { value: v, estimate: e + noise[n - 1] });
    }
    let (a1, n1) = aitken_level(s, noise);
    let (a2, n2) = aitken_level(&a1[2..], &n1[2..]);
    let (est, en): (Vec<Cx<T>>, Vec<T>) = (a2, n2);
    if est.len() < 2 {
        let v = a1[n - 1];
        return Ok(Limit { value: v, estimate: (a1[n - 1] - a1[n - 2]).norm() + n1[n - 1] });
    }
    let mut resid = Vec::with_capacity(est.len());
    for k in 1..est.len() {
        resid.push(((est[k] - est[k - 1]).norm(), k));
    }
    let mut best = (T::infinity(), est.len() - 1);
    for &(r, k) in &resid {
        let score = r + en[k];
        if !(score.is_finite()) {
            continue;
        }
        if score < best.0 {
            best = (score, k);
        }
    }
    // divergence: raw increments never shrink and the residual keeps growing
    let scale = s.iter().fold(T::zero(), |m, v| m.max(v.norm())).max(T::min_positive_value());
    let incr: Vec<T> = s.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let run = divergence_run.max(2);
    if incr.len() > run {
        let tail = &incr[incr.len() - run..];
        let growing = tail.windows(2).all(|w| w[1] >= w[0] * T::lit(0.999));
        let above_noise = tail.iter().zip(&noise[noise.len() - run..]).all(|(d, nz)| *d > T::lit(100.0) * *nz);
        if growing && above_noise && tail[run - 1] > T::lit(1e-6) * scale {
            return Err(Error::Divergence(format!(
                "increments grow toward the endpoint (last {:.3e}); no finite limit",
                tail[run - 1].as_f64()
            )));
        }
    }
    if !best.0.is_finite() {
        return Err(Error::Divergence("extrapolation produced no finite estimate".into()));
    }
    if resid.len() > run {
        let tail: Vec<T> = resid[resid.len() - run..].iter().map(|r| r.0).collect();
        let increasing = tail.windows(2).all(|w| w[1] > w[0]);
        if increasing && best.0 > T::lit(1e-4) * scale.max(T::one()) {
            return Err(Error::Divergence(format!("extrapolation residual not decreasing (best {:.3e})", best.0.as_f64())));
        }
    }
    Ok(Limit { value: est[best.1], estimate: best.0 })
}

fn default_eps0<T: Real>(basis: &ReferenceBasis<T>, lo: T, hi: T, cfg: &LimitConfig<T>) -> Result<T> {
    let d = basis
        .endpoint_value()
        .ok_or_else(|| Error::Unsupported("boundary values at an infinite endpoint".into()))?;
    let len = if lo.is_finite() && hi.is_finite() { hi - lo } else { T::infinity() };
    let mut eps0 = cfg.eps0.unwrap_or(len.min(T::one()) / T::lit(8.0));
    let reach = (basis.reach - d).abs();
    if reach > T::zero() {
        eps0 = eps0.min(reach);
    }
    Ok(eps0)
}

fn interval_of<T: Real>(basis: &ReferenceBasis<T>) -> (T, T) {
    let (l1, h1) = basis.principal.range();
    let (l2, h2) = basis.nonprincipal.range();
    (l1.max(l2), h1.min(h2))
}

/// (g, u, û) at one probe point.
type Sample<T> = (SolutionState<T>, SolutionState<T>, SolutionState<T>);

fn probe<T: Real>(g: &SolutionHandle<T>, basis: &ReferenceBasis<T>, cfg: &LimitConfig<T>) -> Result<Vec<Sample<T>>> {
    let (lo, hi) = interval_of(basis);
    let eps0 = default_eps0(basis, lo, hi, cfg)?;
    let pts = basis.probe_points(eps0, cfg.k_max);
    let mut out = Vec::with_capacity(pts.len());
    for x in pts {
        let gs = match g.eval(x) {
            Ok(s) => s,
            Err(e) if out.len() >= 4 => {
                // the handle cannot get closer; use what we have
                let _ = e;
                break;
            }
            Err(e) => return Err(e),
        };
        out.push((gs, basis.principal.eval(x)?, basis.nonprincipal.eval(x)?));
    }
    Ok(out)
}

fn wronskian_noise<T: Real>(f: &SolutionState<T>, g: &SolutionState<T>, level: T) -> T {
    level * ((f.u * g.u1).norm() + (f.u1 * g.u).norm())
}

/// Extrapolated W(f, g)(d) from states sampled toward d.
pub fn wronskian_limit<T: Real>(pairs: &[(SolutionState<T>, SolutionState<T>)], cfg: &LimitConfig<T>) -> Result<Limit<T>> {
    let mut s = Vec::with_capacity(pairs.len());
    let mut n = Vec::with_capacity(pairs.len());
    for (f, g) in pairs {
        s.push(wronskian(f, g)?);
        n.push(wronskian_noise(f, g, cfg.noise));
    }
    extrapolate_limit(&s, &n, cfg.divergence_run)
}

/// Wronskian route: the primary definition.
pub fn boundary_values<T: Real>(
    g: &SolutionHandle<T>,
    basis: &ReferenceBasis<T>,
    cfg: &LimitConfig<T>,
) -> Result<BoundaryValuePair<T>> {
    let samples = probe(g, basis, cfg)?;
    let a: Vec<_> = samples.iter().map(|(g, u, _)| (*u, *g)).collect();
    let b: Vec<_> = samples.iter().map(|(g, _, uh)| (*uh, *g)).collect();
    let gt = wronskian_limit(&a, cfg)?;
    let gtp = wronskian_limit(&b, cfg)?;
    Ok(BoundaryValuePair {
        side: basis.side,
        g_tilde: -gt.value,
        g_tilde_prime: gtp.value,
        route: Route::Wronskian,
        convergence_estimate: gt.estimate.max(gtp.estimate),
    })
}

/// Quotient route: g̃ = lim g/û (eliminating the u/û term linearly), then
/// g̃′ = lim (g − g̃·û)/u using g̃ from the Wronskian route.
pub fn boundary_values_quotient<T: Real>(
    g: &SolutionHandle<T>,
    basis: &ReferenceBasis<T>,
    g_tilde_wronskian: Cx<T>,
    cfg: &LimitConfig<T>,
) -> Result<BoundaryValuePair<T>> {
    let samples = probe(g, basis, cfg)?;
    let lvl = cfg.noise;
    let mut q = Vec::new();
    let mut rho = Vec::new();
    let mut qn = Vec::new();
    for (gs, u, uh) in &samples {
        if uh.u.norm() == T::zero() {
            continue;
        }
        q.push(gs.u / uh.u);
        rho.push(u.u / uh.u);
        qn.push(lvl * (gs.u / uh.u).norm() * T::lit(2.0));
    }
    let mut elim = Vec::new();
    let mut en = Vec::new();
    for k in 1..q.len() {
        let den = rho[k - 1] - rho[k];
        if den.norm() == T::zero() {
            continue;
        }
        let v = (q[k] * rho[k - 1] - q[k - 1] * rho[k]) / den;
        let amp = (rho[k - 1].norm() + rho[k].norm()) / den.norm();
        elim.push(v);
        en.push((qn[k] + qn[k - 1]) * (T::one() + amp) + lvl * v.norm());
    }
    let gt = extrapolate_limit(&elim, &en, cfg.divergence_run)?;

    let mut p = Vec::new();
    let mut pn = Vec::new();
    for (gs, u, uh) in &samples {
        let r = (u.u / uh.u).norm();
        if !(r >= cfg.min_ratio) || u.u.norm() == T::zero() {
            continue;
        }
        let num = gs.u - g_tilde_wronskian * uh.u;
        let v = num / u.u;
        let noise = lvl * ((gs.u.norm() + (g_tilde_wronskian * uh.u).norm()) / u.u.norm()) * T::lit(4.0);
        if noise > v.norm().max(T::one()) * T::lit(1e-2) {
            continue;
        }
        p.push(v);
        pn.push(noise);
    }
    if p.len() < 3 {
        return Err(Error::Divergence("too few usable points for the quotient g̃′".into()));
    }
    let gtp = extrapolate_limit(&p, &pn, cfg.divergence_run)?;
    Ok(BoundaryValuePair {
        side: basis.side,
        g_tilde: gt.value,
        g_tilde_prime: gtp.value,
        route: Route::Quotient,
        convergence_estimate: gt.estimate.max(gtp.estimate),
    })
}

/// Both routes with their disagreement.
#[derive(Debug, Clone, Copy)]
pub struct CheckedBoundaryValues<T> {
    pub wronskian: BoundaryValuePair<T>,
    pub quotient: BoundaryValuePair<T>,
    pub disagreement: T,
}

pub fn boundary_values_checked<T: Real>(
    g: &SolutionHandle<T>,
    basis: &ReferenceBasis<T>,
    cfg: &LimitConfig<T>,
) -> Result<CheckedBoundaryValues<T>> {
    let w = boundary_values(g, basis, cfg)?;
    let q = boundary_values_quotient(g, basis, w.g_tilde, cfg)?;
    let disagreement = (w.g_tilde - q.g_tilde).norm().max((w.g_tilde_prime - q.g_tilde_prime).norm());
    Ok(CheckedBoundaryValues { wronskian: w, quotient: q, disagreement })
}

/// g̃(d)·h̃′(d) − g̃′(d)·h̃(d).
pub fn lagrange_bracket<T: Real>(
    g: &SolutionHandle<T>,
    h: &SolutionHandle<T>,
    basis: &ReferenceBasis<T>,
    cfg: &LimitConfig<T>,
) -> Result<Cx<T>> {
    let gb = boundary_values(g, basis, cfg)?;
    let hb = boundary_values(h, basis, cfg)?;
    Ok(gb.g_tilde * hb.g_tilde_prime - gb.g_tilde_prime * hb.g_tilde)
}

/// W(g, h)(d) extrapolated directly, for comparison with [`lagrange_bracket`].
pub fn wronskian_at_endpoint<T: Real>(
    g: &SolutionHandle<T>,
    h: &SolutionHandle<T>,
    basis: &ReferenceBasis<T>,
    cfg: &LimitConfig<T>,
) -> Result<Limit<T>> {
    let (lo, hi) = interval_of(basis);
    let eps0 = default_eps0(basis, lo, hi, cfg)?;
    let mut pairs = Vec::new();
    for x in basis.probe_points(eps0, cfg.k_max) {
        match (g.eval(x), h.eval(x)) {
            (Ok(a), Ok(b)) => pairs.push((a, b)),
            (Err(e), _) | (_, Err(e)) => {
                if pairs.len() >= 4 {
                    break;
                }
                return Err(e);
            }
        }
    }
    wronskian_limit(&pairs, cfg)
}

/// Classical basis at a regular endpoint: û(d) = 1, û^{[1]}(d) = 0,
/// u(d) = 0, u^{[1]}(d) = ±1 (sign making W(û, u) = 1 … here +1).
pub fn regular_basis<T: Real>(
    problem: &SlProblem<T>,
    side: Side,
    lambda0: T,
    cfg: &IntegratorConfig<T>,
) -> Result<ReferenceBasis<T>> {
    let d = problem
        .endpoint(side)
        .finite()
        .ok_or_else(|| Error::Unsupported("regular basis at an infinite endpoint".into()))?;
    let len = problem.length();
    let span = if len.is_finite() { len * T::lit(0.5) } else { T::one() };
    let toward = if side == Side::Left { T::one() } else { -T::one() };
    let h = span * T::lit(1e-9);
    let x0 = d + toward * h;
    let reach = d + toward * span;
    let (p0, q0, r0) = problem.coefficients(x0)?;
    // second-order start: û ≈ 1, û1 ≈ (q − λr)·(x − d); u ≈ (x − d)/p, u1 ≈ 1
    let w = (q0 - lambda0 * r0) * toward * h;
    let uh0 = SolutionState::real(x0, T::one(), w);
    let u0 = SolutionState::real(x0, toward * h / p0, T::one());
    let z = re(lambda0);
    let sys = Standard { problem, z, fraction: cfg.endpoint_fraction };
    let n = 16;
    let targets: Vec<T> = (1..=n).map(|i| d + toward * span * T::from_usize(i).unwrap() / T::from_usize(n).unwrap()).collect();
    let mut handles = Vec::new();
    for s0 in [uh0, u0] {
        let mut states = vec![s0];
        drive(&sys, x0, [s0.u, s0.u1], &targets, cfg, |x, y, hit| {
            if hit {
                states.push(SolutionState::new(x, y[0], y[1]));
            }
        })?;
        let (lo, hi) = if side == Side::Left { (d, reach * (T::one() + T::epsilon()) + T::epsilon()) } else { (reach - T::epsilon() * (T::one() + reach.abs()), d) };
        handles.push(Integrated::new(problem.clone(), z, states, *cfg)?.with_hop(HopFrom::Nearest).with_range(lo, hi).into_handle());
    }
    let uh = handles.remove(0);
    let u = handles.remove(0);
    ReferenceBasis::new(side, Bound::Finite(d), lambda0, u, uh, d + toward * span * T::lit(0.5), "classical: (û, û^[1]) = (1, 0), (u, u^[1]) = (0, 1) at d")
}

/// (g(d), g^{[1]}(d)) directly, checked against the generalized boundary
/// values in the classical basis.
pub fn regular_recovery_check<T: Real>(
    problem: &SlProblem<T>,
    side: Side,
    g: &SolutionHandle<T>,
    tol: T,
    cfg: &LimitConfig<T>,
) -> Result<(Cx<T>, Cx<T>)> {
    let icfg = IntegratorConfig::with_tolerances(T::lit(1e-13).max(T::epsilon() * T::lit(64.0)), T::lit(1e-15).max(T::epsilon()));
    let basis = regular_basis(problem, side, g.z().re, &icfg)?;
    let d = basis.endpoint_value().unwrap();
    let direct = match g.eval(d) {
        Ok(s) => (s.u, s.u1),
        Err(_) => {
            let (lo, hi) = interval_of(&basis);
            let eps0 = default_eps0(&basis, lo, hi, cfg)?;
            let pts = basis.probe_points(eps0, cfg.k_max);
            let st: Vec<SolutionState<T>> = pts.iter().map(|&x| g.eval(x)).collect::<Result<_>>()?;
            let u: Vec<Cx<T>> = st.iter().map(|s| s.u).collect();
            let u1: Vec<Cx<T>> = st.iter().map(|s| s.u1).collect();
            let nu: Vec<T> = u.iter().map(|v| v.norm() * cfg.noise).collect();
            let nu1: Vec<T> = u1.iter().map(|v| v.norm() * cfg.noise).collect();
            (extrapolate_limit(&u, &nu, cfg.divergence_run)?.value, extrapolate_limit(&u1, &nu1, cfg.divergence_run)?.value)
        }
    };
    let gen = boundary_values(g, &basis, cfg)?;
    let mismatch = (gen.g_tilde - direct.0).norm().max((gen.g_tilde_prime - direct.1).norm());
    if mismatch > tol * T::one().max(direct.0.norm()).max(direct.1.norm()) {
        return Err(Error::Argument(format!(
            "basis-normalization defect: generalized ({}, {}) vs direct ({}, {})",
            gen.g_tilde, gen.g_tilde_prime, direct.0, direct.1
        )));
    }
    Ok(direct)
}
