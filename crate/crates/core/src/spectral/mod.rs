//! Eigenvalues by shooting in λ and numerical Weyl–Titchmarsh m-functions.
//!
//! Near a limit-circle endpoint d a solution y is carried in the coordinates
//! A = −W(u_d, y), B = W(û_d, y) of the λ₀-basis, y = B·u_d + A·û_d, which
//! satisfy
//!
//!   A′ = μr(uû·A + u²·B),  B′ = −μr(û²·A + uû·B),  μ = λ − λ₀.
//!
//! The coefficients are integrable at d, so (A, B)(d) are the generalized
//! boundary values (g̃, g̃′)(d). Seeding happens at d ± δ over a geometric
//! sequence of δ, with the sequence of results extrapolated to δ → 0.

mod eigen;
mod layer;
mod mfun;

pub use eigen::{eigenvalues, BracketInfo, Eigenlist};
pub use layer::{shoot_left, shoot_with_data};
pub use mfun::{m_function, MSample};

use crate::error::{Error, Result};
use crate::integrator::IntegratorConfig;
use crate::model::{Bound, EndpointClass, Side, SlProblem};
use crate::oracles::CatalogProblem;
use crate::principal::{build_reference_basis, BasisConfig, ReferenceBasis};
use crate::scalar::{Cx, Real};

#[derive(Debug, Clone, Copy)]
pub struct SpectralConfig<T> {
    pub integrator: IntegratorConfig<T>,
    /// First layer seed as a fraction of the distance from the endpoint to
    /// the matching point.
    pub layer_start: T,
    /// Seed distances shrink by this factor per level.
    pub layer_ratio: T,
    pub layer_levels: usize,
    /// Accepted extrapolation estimate, relative to max(1, |value|).
    pub layer_tol: T,
    /// Rounding level of a single integrated value (relative).
    pub noise: T,
    pub panels: usize,
    pub root_rel_tol: T,
    pub root_abs_tol: T,
    /// |D| at a window end below this fraction of the median |D| counts as
    /// sitting on an eigenvalue.
    pub endpoint_tol: T,
    /// First truncation point X₀ at an infinite limit-point endpoint.
    pub truncation_start: T,
    pub truncation_doublings: usize,
    /// Eigenvalue change accepted between truncations X and 2X (relative).
    pub truncation_tol: T,
    /// Weyl-disk radius accepted for m (relative to max(1, |m|)).
    pub m_tol: T,
    /// Fan the eigenvalue scan out over the rayon pool.
    pub parallel: bool,
}

impl<T: Real> Default for SpectralConfig<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        SpectralConfig {
            integrator: IntegratorConfig::with_tolerances(T::lit(1e-12).max(eps * T::lit(64.0)), T::lit(1e-14).max(eps * T::lit(8.0))),
            layer_start: T::lit(1e-2),
            layer_ratio: T::lit(4.0),
            layer_levels: 30,
            layer_tol: T::lit(1e-9),
            noise: eps * T::lit(64.0),
            panels: 400,
            root_rel_tol: T::lit(1e-10),
            root_abs_tol: T::lit(1e-12),
            endpoint_tol: T::lit(1e-9),
            truncation_start: T::lit(32.0),
            truncation_doublings: 6,
            truncation_tol: T::lit(1e-9),
            m_tol: T::lit(1e-10),
            parallel: true,
        }
    }
}

/// A problem with a limit-circle left endpoint, its reference bases and the
/// matching points where the boundary layers hand over to plain integration.
#[derive(Debug, Clone)]
pub struct SpectralSetup<T: Real> {
    pub problem: SlProblem<T>,
    pub classes: [EndpointClass; 2],
    pub basis_a: ReferenceBasis<T>,
    /// Present exactly when b is limit circle.
    pub basis_b: Option<ReferenceBasis<T>>,
    pub x_left: T,
    pub x_right: T,
}

impl<T: Real> SpectralSetup<T> {
    pub fn new(
        problem: SlProblem<T>,
        classes: [EndpointClass; 2],
        basis_a: ReferenceBasis<T>,
        basis_b: Option<ReferenceBasis<T>>,
    ) -> Result<Self> {
        if classes[0] != EndpointClass::LimitCircle {
            return Err(Error::Unsupported("shooting needs a limit-circle left endpoint".into()));
        }
        if basis_a.side != Side::Left || problem.a.finite().is_none() {
            return Err(Error::Argument("left basis must belong to a finite left endpoint".into()));
        }
        let lc_b = classes[1] == EndpointClass::LimitCircle;
        match &basis_b {
            Some(_) if !lc_b => {
                return Err(Error::BoundaryCondition("a basis was given at the limit-point right endpoint".into()))
            }
            Some(b) if b.side != Side::Right || problem.b.finite().is_none() => {
                return Err(Error::Argument("right basis must belong to a finite right endpoint".into()))
            }
            None if lc_b => return Err(Error::Argument("limit-circle right endpoint needs a basis".into())),
            _ => {}
        }
        let mut x_left = basis_a.reach;
        let mut x_right = basis_b.as_ref().map_or(x_left, |b| b.reach);
        if x_left > x_right {
            let mid = (x_left + x_right) * T::lit(0.5);
            x_left = mid;
            x_right = mid;
        }
        problem.check_interior(x_left)?;
        problem.check_interior(x_right)?;
        Ok(SpectralSetup { problem, classes, basis_a, basis_b, x_left, x_right })
    }

    /// Closed-form λ₀ = 0 bases of a catalog problem.
    pub fn from_catalog(cp: &CatalogProblem<T>) -> Result<Self> {
        let basis_b = match cp.class(Side::Right) {
            EndpointClass::LimitCircle => Some(cp.basis(Side::Right)?),
            EndpointClass::LimitPoint => None,
        };
        SpectralSetup::new(cp.problem.clone(), cp.classes, cp.basis(Side::Left)?, basis_b)
    }

    /// Bases built numerically at λ₀ (below the spectrum).
    pub fn build(problem: SlProblem<T>, classes: [EndpointClass; 2], lambda0: T, cfg: &BasisConfig<T>) -> Result<Self> {
        let basis_a = build_reference_basis(&problem, lambda0, Side::Left, cfg)?;
        let basis_b = match classes[1] {
            EndpointClass::LimitCircle => Some(build_reference_basis(&problem, lambda0, Side::Right, cfg)?),
            EndpointClass::LimitPoint => None,
        };
        SpectralSetup::new(problem, classes, basis_a, basis_b)
    }

    pub fn lc_right(&self) -> bool {
        self.basis_b.is_some()
    }

    /// Truncation points X₀ < X₁ < … toward a limit-point b.
    pub fn truncation_points(&self, cfg: &SpectralConfig<T>) -> Vec<T> {
        let two = T::lit(2.0);
        (0..=cfg.truncation_doublings)
            .map(|k| match self.problem.b {
                Bound::Finite(b) => b - (b - self.x_left) / two.powi(k as i32 + 1),
                _ => {
                    let x0 = cfg.truncation_start.max(self.x_left + T::one());
                    self.x_left + (x0 - self.x_left) * two.powi(k as i32)
                }
            })
            .collect()
    }
}

/// m_{α₁,β₀} from m_{α₀,β₀}:
/// (−sin(α₁−α₀) + cos(α₁−α₀)m) / (cos(α₁−α₀) + sin(α₁−α₀)m).
pub fn mobius_alpha_shift<T: Real>(m: Cx<T>, alpha0: T, alpha1: T) -> Result<Cx<T>> {
    let d = alpha1 - alpha0;
    let (s, c) = (d.sin(), d.cos());
    let den = m * s + c;
    if den.norm() < T::lit(1e-14) {
        return Err(Error::Pole(format!("α-shift of m = {m} by {d} hits a pole")));
    }
    Ok((m * c - s) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn mobius_examples() {
        let m = cx(0.3, 1.7);
        assert_eq!(mobius_alpha_shift(m, 0.4, 0.4).unwrap(), m);
        let q = mobius_alpha_shift(cx(0.0, 1.0), 0.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((q - cx(0.0, 1.0)).norm() < 1e-15);
        let back = mobius_alpha_shift(mobius_alpha_shift(m, 0.0, 0.9).unwrap(), 0.9, 0.0).unwrap();
        assert!((back - m).norm() < 1e-12);
        // m = −cot δ makes the denominator vanish
        let d: f64 = 0.7;
        assert!(matches!(mobius_alpha_shift(cx(-1.0 / d.tan(), 0.0), 0.0, d), Err(Error::Pole(_))));
    }
}
