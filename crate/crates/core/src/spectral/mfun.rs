//! Numerical Weyl–Titchmarsh m-function.

use crate::error::{Error, Result};
use crate::scalar::{re, Cx, Real};

use super::layer::{advance, left_at_match, right_limit, to_state};
use super::{SpectralConfig, SpectralSetup};

#[derive(Debug, Clone, Copy)]
pub struct MSample<T: Real> {
    pub z: Cx<T>,
    pub m: Cx<T>,
    /// Final truncation point X at a limit-point b.
    pub truncation_radius: Option<T>,
    /// |m_X − m_{X/2}| at a limit-point b; propagated layer estimate otherwise.
    pub disk_radius_estimate: T,
}

/// m_{α₀,β₀}(z): θ_α₀ + m·φ_α₀ satisfies the β₀ condition at a limit-circle b,
/// or vanishes at X → ∞ (Dirichlet truncation, X doubled) at a limit-point b.
/// θ has boundary data (cos α₀, sin α₀), φ has (−sin α₀, cos α₀).
pub fn m_function<T: Real>(
    setup: &SpectralSetup<T>,
    alpha0: T,
    beta0: Option<T>,
    z: Cx<T>,
    cfg: &SpectralConfig<T>,
) -> Result<MSample<T>> {
    let (s, c) = (alpha0.sin(), alpha0.cos());
    let (vt, et) = left_at_match(setup, [re(c), re(s)], z, cfg)?;
    let (vp, ep) = left_at_match(setup, [re(-s), re(c)], z, cfg)?;
    let xl = setup.x_left;
    let theta = to_state(&setup.basis_a, xl, vt)?;
    let phi = to_state(&setup.basis_a, xl, vp)?;
    let problem = &setup.problem;
    let icfg = &cfg.integrator;

    if setup.lc_right() {
        let beta = beta0.ok_or_else(|| Error::Argument("limit-circle right endpoint needs β₀".into()))?;
        let tr = advance(problem, z, &theta, setup.x_right, icfg)?;
        let pr = advance(problem, z, &phi, setup.x_right, icfg)?;
        let (wt, e1) = right_limit(setup, &tr, z, cfg)?;
        let (wp, e2) = right_limit(setup, &pr, z, cfg)?;
        let dt = wt[0] * beta.cos() + wt[1] * beta.sin();
        let dp = wp[0] * beta.cos() + wp[1] * beta.sin();
        if dp.norm() <= T::lit(1e-14) * (dt.norm() + dp.norm()) {
            return Err(Error::Pole(format!("z = {z} is an eigenvalue of the (α₀, β₀) problem")));
        }
        let m = -(dt / dp);
        let est = (et + ep + e1 + e2) * (T::one() + m.norm()) / dp.norm().max(T::min_positive_value());
        return Ok(MSample { z, m, truncation_radius: None, disk_radius_estimate: est });
    }

    if beta0.is_some() {
        return Err(Error::BoundaryCondition("β₀ given at a limit-point right endpoint".into()));
    }
    let mut t = theta;
    let mut p = phi;
    let mut prev: Option<Cx<T>> = None;
    let mut radii: Vec<T> = Vec::new();
    for x in setup.truncation_points(cfg) {
        t = advance(problem, z, &t, x, icfg)?;
        p = advance(problem, z, &p, x, icfg)?;
        if p.u.norm() == T::zero() {
            return Err(Error::Pole(format!("φ vanishes at the truncation point {x}")));
        }
        let m = -(t.u / p.u);
        if let Some(mp) = prev {
            let r = (m - mp).norm();
            if r <= cfg.m_tol * T::one().max(m.norm()) {
                return Ok(MSample { z, m, truncation_radius: Some(x), disk_radius_estimate: r });
            }
            radii.push(r);
            if radii.len() >= 3 && radii.windows(2).rev().take(2).all(|w| w[1] >= w[0]) {
                return Err(Error::Divergence(format!(
                    "Weyl disk does not contract at z = {z} (radius {:.3e} at X = {x}); is b really limit point?",
                    r.as_f64()
                )));
            }
        }
        prev = Some(m);
    }
    Err(Error::Divergence(format!(
        "Weyl disk radius {:.3e} above tolerance after all truncation doublings",
        radii.last().map_or(f64::INFINITY, |r| r.as_f64())
    )))
}
