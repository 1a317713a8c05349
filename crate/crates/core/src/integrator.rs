//! Dormand–Prince 5(4) integration of u′ = u1/p, u1′ = (q − z r)u.

use crate::error::{Error, Result};
use crate::model::{Direction, SlProblem, SolutionState, Trajectory};
use crate::principal::ReferenceBasis;
use crate::quadrature::{integrate_adaptive, QuadConfig};
use crate::scalar::{Cx, Real};

#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig<T> {
    pub rel_tol: T,
    /// Absolute floor, measured in units of the initial state's magnitude so
    /// that integrating c·s takes exactly the steps used for s.
    pub abs_tol: T,
    pub max_steps: usize,
    pub min_step: T,
    /// Step ceiling as a fraction of the distance to the nearest finite endpoint.
    pub endpoint_fraction: T,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        IntegratorConfig {
            rel_tol: T::lit(1e-10).max(eps * T::lit(64.0)),
            abs_tol: T::lit(1e-12).max(eps * T::lit(8.0)),
            max_steps: 1_000_000,
            min_step: T::min_positive_value().sqrt(),
            endpoint_fraction: T::lit(0.25),
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn with_tolerances(rel_tol: T, abs_tol: T) -> Self {
        IntegratorConfig { rel_tol, abs_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero()) || !(self.abs_tol > T::zero()) || self.max_steps == 0 {
            return Err(Error::Argument("integrator tolerances must be positive and max_steps ≥ 1".into()));
        }
        if !(self.endpoint_fraction > T::zero()) || !(self.min_step >= T::zero()) {
            return Err(Error::Argument("invalid step controls".into()));
        }
        Ok(())
    }
}

pub(crate) type Vec2<T> = [Cx<T>; 2];

/// y′ = F(x, y) for a linear two-component system.
pub(crate) trait LinearOde<T: Real> {
    fn rhs(&self, x: T, y: &Vec2<T>) -> Result<Vec2<T>>;
    /// Largest admissible |step| at x.
    fn step_ceiling(&self, x: T) -> T;
}

pub(crate) struct Standard<'a, T> {
    pub problem: &'a SlProblem<T>,
    pub z: Cx<T>,
    pub fraction: T,
}

impl<T: Real> LinearOde<T> for Standard<'_, T> {
    #[inline]
    fn rhs(&self, x: T, y: &Vec2<T>) -> Result<Vec2<T>> {
        let (p, q, r) = self.problem.coefficients(x)?;
        Ok([y[1] / p, y[0] * (Cx::new(q, T::zero()) - self.z * r)])
    }

    fn step_ceiling(&self, x: T) -> T {
        self.fraction * self.problem.distance_to_finite_endpoint(x)
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn failure<T: Real>(reason: impl Into<String>, x: T, y: &Vec2<T>) -> Error {
    Error::Integration {
        reason: reason.into(),
        x: x.as_f64(),
        u_re: y[0].re.as_f64(),
        u_im: y[0].im.as_f64(),
        u1_re: y[1].re.as_f64(),
        u1_im: y[1].im.as_f64(),
    }
}

fn finite2<T: Real>(y: &Vec2<T>) -> bool {
    y.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Integrate from (x0, y0) through `targets` (monotone, all on the same side
/// of x0), landing exactly on each target. `on_step` sees every accepted
/// step; the flag marks target landings. Returns the state at the last target.
pub(crate) fn drive<T, S, F>(
    sys: &S,
    x0: T,
    y0: Vec2<T>,
    targets: &[T],
    cfg: &IntegratorConfig<T>,
    mut on_step: F,
) -> Result<Vec2<T>>
where
    T: Real,
    S: LinearOde<T>,
    F: FnMut(T, &Vec2<T>, bool),
{
    cfg.validate()?;
    let Some(&last) = targets.last() else {
        return Ok(y0);
    };
    let sign = if last > x0 { T::one() } else { -T::one() };
    let scale0 = y0[0].norm().max(y0[1].norm());
    let abs_floor = if scale0 > T::zero() { cfg.abs_tol * scale0 } else { cfg.abs_tol };
    let (alpha, beta) = (T::lit(0.7 / 5.0), T::lit(0.4 / 5.0));

    let mut x = x0;
    let mut y = y0;
    let mut k1 = sys.rhs(x, &y).map_err(|e| wrap(e, x, &y))?;
    let mut h = (last - x0).abs() * T::lit(0.01);
    let mut err_prev = T::one();
    let mut steps = 0usize;
    let mut ti = 0;
    while ti < targets.len() {
        let target = targets[ti];
        if (target - x) * sign < T::zero() {
            return Err(Error::Argument("integration targets must be monotone".into()));
        }
        if target == x {
            on_step(x, &y, true);
            ti += 1;
            continue;
        }
        let ceiling = sys.step_ceiling(x);
        let tiny = cfg.min_step.max(T::lit(16.0) * T::epsilon() * x.abs());
        let h_req = h;
        let mut hh = h.min(ceiling);
        let mut landing = false;
        if hh >= (target - x).abs() || (target - x).abs() <= tiny {
            hh = (target - x).abs();
            landing = true;
        }
        if hh < tiny && !landing {
            return Err(failure("step size underflow", x, &y));
        }
        steps += 1;
        if steps > cfg.max_steps {
            return Err(failure("step budget exhausted", x, &y));
        }
        let hs = hh * sign;
        let mut k = [k1; 7];
        let mut ok = true;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = T::lit(A[s][j]);
                if a != T::zero() {
                    ys[0] = ys[0] + kj[0] * (a * hs);
                    ys[1] = ys[1] + kj[1] * (a * hs);
                }
            }
            let xs = if s >= 5 { x + hs } else { x + hs * T::lit(C[s]) };
            let xs = if landing && s >= 5 { target } else { xs };
            match sys.rhs(xs, &ys) {
                Ok(v) if finite2(&v) => k[s] = v,
                Ok(_) => {
                    ok = false;
                    break;
                }
                Err(e @ Error::Coefficient { .. }) | Err(e @ Error::Domain { .. }) => {
                    if hh <= tiny {
                        return Err(wrap(e, x, &y));
                    }
                    ok = false;
                    break;
                }
                Err(e) => return Err(wrap(e, x, &y)),
            }
            if s == 6 {
                // y_{n+1} is the stage-7 input (FSAL)
                let y_new = ys;
                let mut err_sq = T::zero();
                for c in 0..2 {
                    let mut e = Cx::new(T::zero(), T::zero());
                    for (j, kj) in k.iter().enumerate() {
                        e = e + kj[c] * T::lit(E[j]);
                    }
                    let e = e * hs;
                    let sc = abs_floor + cfg.rel_tol * y[c].norm().max(y_new[c].norm());
                    let ratio = e.norm() / sc;
                    err_sq = err_sq + ratio * ratio;
                }
                let err = (err_sq * T::lit(0.5)).sqrt();
                if !err.is_finite() || err > T::one() {
                    let fac = if err.is_finite() {
                        (T::lit(0.9) * err.powf(-T::lit(0.2))).max(T::lit(0.2))
                    } else {
                        T::lit(0.2)
                    };
                    h = hh * fac;
                    ok = false;
                    break;
                }
                // accept
                x = if landing { target } else { x + hs };
                y = y_new;
                k1 = k[6];
                let err_c = err.max(T::lit(1e-10));
                let fac = T::lit(0.9) * err_c.powf(-alpha) * err_prev.powf(beta);
                h = hh * fac.min(T::lit(5.0)).max(T::lit(0.2));
                if landing {
                    // a short landing step says nothing about the natural step
                    h = h.max(hh).max(h_req);
                }
                err_prev = err_c;
                on_step(x, &y, landing);
                if landing {
                    ti += 1;
                }
            }
        }
        if !ok
            && (h.is_nan() || h >= hh) {
                h = hh * T::lit(0.25);
            }
    }
    Ok(y)
}

fn wrap<T: Real>(e: Error, x: T, y: &Vec2<T>) -> Error {
    match e {
        Error::Integration { .. } => e,
        other => failure(other.to_string(), x, y),
    }
}

/// Integrate τu = z u from `from` to `to_x`, recording every accepted step.
pub fn integrate<T: Real>(
    problem: &SlProblem<T>,
    z: Cx<T>,
    from: &SolutionState<T>,
    to_x: T,
    cfg: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    problem.check_interior(from.x)?;
    problem.check_interior(to_x)?;
    if from.x == to_x {
        return Err(Error::Argument("integration interval is empty".into()));
    }
    let sys = Standard { problem, z, fraction: cfg.endpoint_fraction };
    let mut states = vec![*from];
    drive(&sys, from.x, [from.u, from.u1], &[to_x], cfg, |x, y, _| {
        states.push(SolutionState::new(x, y[0], y[1]));
    })?;
    let direction = if to_x > from.x { Direction::Forward } else { Direction::Backward };
    Ok(Trajectory { states, z, direction })
}

/// States at each of `points` (monotone away from `from.x`), plus the full
/// step record.
pub fn integrate_through<T: Real>(
    problem: &SlProblem<T>,
    z: Cx<T>,
    from: &SolutionState<T>,
    points: &[T],
    cfg: &IntegratorConfig<T>,
) -> Result<(Vec<SolutionState<T>>, Trajectory<T>)> {
    problem.check_interior(from.x)?;
    for &p in points {
        problem.check_interior(p)?;
    }
    let sys = Standard { problem, z, fraction: cfg.endpoint_fraction };
    let mut states = vec![*from];
    let mut hits = Vec::with_capacity(points.len());
    drive(&sys, from.x, [from.u, from.u1], points, cfg, |x, y, landed| {
        let s = SolutionState::new(x, y[0], y[1]);
        states.push(s);
        if landed {
            hits.push(s);
        }
    })?;
    let direction = match points.last() {
        Some(&l) if l < from.x => Direction::Backward,
        _ => Direction::Forward,
    };
    Ok((hits, Trajectory { states, z, direction }))
}

/// Variation of constants with C = D = 0: the solution of (τ − λ0)y = f with
/// y(x0) = y1(x0) = 0, evaluated at x.
pub fn solve_inhomogeneous<T, F>(
    problem: &SlProblem<T>,
    lambda0: T,
    basis: &ReferenceBasis<T>,
    f: F,
    x0: T,
    x: T,
) -> Result<SolutionState<T>>
where
    T: Real,
    F: Fn(T) -> Cx<T>,
{
    if basis.lambda0 != lambda0 {
        return Err(Error::Argument(format!(
            "basis built at lambda0 = {}, requested {}",
            basis.lambda0, lambda0
        )));
    }
    problem.check_interior(x0)?;
    problem.check_interior(x)?;
    let cfg = QuadConfig { rel_tol: T::lit(1e-12).max(T::epsilon() * T::lit(50.0)), ..QuadConfig::default() };
    // y(x) = [u(x)·∫ r û f − û(x)·∫ r u f] / W(u, û), W(u, û) = −1
    let mut iu = Cx::new(T::zero(), T::zero());
    let mut iuh = Cx::new(T::zero(), T::zero());
    if x != x0 {
        iuh = integrate_adaptive(
            |t| Ok(basis.nonprincipal.eval(t)?.u * f(t) * problem.r(t)?),
            x0,
            x,
            &cfg,
        )?
        .value;
        iu = integrate_adaptive(
            |t| Ok(basis.principal.eval(t)?.u * f(t) * problem.r(t)?),
            x0,
            x,
            &cfg,
        )?
        .value;
    }
    let u = basis.principal.eval(x)?;
    let uh = basis.nonprincipal.eval(x)?;
    let w = -basis.normalization();
    Ok(SolutionState::new(
        x,
        (u.u * iuh - uh.u * iu) / w,
        (u.u1 * iuh - uh.u1 * iu) / w,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{wronskian, Bound};
    use crate::scalar::cx;

    fn free(a: f64, b: f64) -> SlProblem<f64> {
        SlProblem::new(Bound::Finite(a), Bound::Finite(b), |_| 1.0, |_| 0.0, |_| 1.0).unwrap()
    }

    fn legendre() -> SlProblem<f64> {
        SlProblem::new(Bound::Finite(-1.0), Bound::Finite(1.0), |x: f64| (1.0 - x) * (1.0 + x), |_| 0.0, |_| 1.0)
            .unwrap()
    }

    #[test]
    fn constant_solution() {
        let cfg = IntegratorConfig::default();
        let t = integrate(&free(0.0, 1.0), cx(0.0, 0.0), &SolutionState::real(0.1, 1.0, 0.0), 0.9, &cfg).unwrap();
        let s = t.last();
        assert_eq!(s.x, 0.9);
        assert!((s.u - 1.0).norm() < 1e-14 && s.u1.norm() < 1e-14);
    }

    #[test]
    fn sine_quarter_period() {
        let cfg = IntegratorConfig::default();
        let p = free(-1.0, 3.0);
        let t = integrate(&p, cx(1.0, 0.0), &SolutionState::real(0.0, 0.0, 1.0), std::f64::consts::FRAC_PI_2, &cfg)
            .unwrap();
        let s = t.last();
        assert!((s.u - 1.0).norm() < 1e-8 && s.u1.norm() < 1e-8, "{s:?}");
    }

    #[test]
    fn legendre_first_eigenfunction() {
        let cfg = IntegratorConfig::default();
        let t = integrate(&legendre(), cx(2.0, 0.0), &SolutionState::real(0.0, 0.0, 1.0), 0.5, &cfg).unwrap();
        let s = t.last();
        assert!((s.u - 0.5).norm() < 1e-9 && (s.u1 - 0.75).norm() < 1e-9, "{s:?}");
    }

    #[test]
    fn backward_direction_and_monotone_record() {
        let cfg = IntegratorConfig::default();
        let t = integrate(&legendre(), cx(0.3, 0.7), &SolutionState::real(0.5, 1.0, 0.0), -0.9, &cfg).unwrap();
        assert_eq!(t.direction, Direction::Backward);
        assert!(t.states.windows(2).all(|w| w[1].x < w[0].x));
    }

    #[test]
    fn through_points_lands_exactly() {
        let cfg = IntegratorConfig::default();
        let pts = [0.2, 0.4, 0.8];
        let (hits, traj) =
            integrate_through(&free(0.0, 1.0), cx(1.0, 0.0), &SolutionState::real(0.1, 0.0, 1.0), &pts, &cfg).unwrap();
        assert_eq!(hits.iter().map(|s| s.x).collect::<Vec<_>>(), pts);
        assert!(traj.len() >= 4);
        for s in hits {
            assert!((s.u.re - (s.x - 0.1f64).sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_exterior_points() {
        let cfg = IntegratorConfig::default();
        let r = integrate(&free(0.0, 1.0), cx(0.0, 0.0), &SolutionState::real(0.5, 1.0, 0.0), 1.0, &cfg);
        assert!(matches!(r, Err(Error::Domain { .. })));
    }

    #[test]
    fn budget_exhaustion_reports_last_state() {
        let cfg = IntegratorConfig { max_steps: 3, ..IntegratorConfig::default() };
        let r = integrate(&free(0.0, 100.0), cx(400.0, 0.0), &SolutionState::real(1.0, 0.0, 1.0), 90.0, &cfg);
        assert!(matches!(r, Err(Error::Integration { .. })));
    }

    #[test]
    fn singular_endpoint_geometric_steps() {
        // Bessel γ = 0.25 toward 0: u = x^{3/4} solves τu = 0
        let q = |x: f64| (0.0625 - 0.25) / (x * x);
        let p = SlProblem::new(Bound::Finite(0.0), Bound::PosInfinity, |_| 1.0, q, |_| 1.0).unwrap();
        let cfg = IntegratorConfig::default();
        let x0: f64 = 1.0;
        let x1 = 1e-8;
        let t = integrate(&p, cx(0.0, 0.0), &SolutionState::real(x0, 1.0, 0.75), x1, &cfg).unwrap();
        let s = t.last();
        assert!((s.u.re - x1.powf(0.75)).abs() < 1e-8 * x1.powf(0.75) + 1e-12, "{s:?}");
        let w = wronskian(s, &SolutionState::real(x1, x1.powf(0.75), 0.75 * x1.powf(-0.25))).unwrap();
        assert!(w.norm() < 1e-9);
    }

    #[test]
    fn generic_over_f32() {
        let p = SlProblem::<f32>::new(Bound::Finite(0.0), Bound::Finite(4.0), |_| 1.0, |_| 0.0, |_| 1.0).unwrap();
        let cfg = IntegratorConfig::<f32>::default();
        let t = integrate(&p, cx(1.0f32, 0.0), &SolutionState::real(1.0f32, 0.0, 1.0), 2.0, &cfg).unwrap();
        assert!((t.last().u.re - 1f32.sin()).abs() < 1e-4);
    }
}
