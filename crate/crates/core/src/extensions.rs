//! Self-adjoint boundary conditions: separated, coupled, general (A, B) and
//! the Friedrichs extension.

use std::ops::{Add, Mul, Sub};

use crate::bvals::BoundaryValuePair;
use crate::classifier::{EndpointReport, Verdict};
use crate::error::{Error, Result};
use crate::model::{EndpointClass, Side};
use crate::scalar::{cx, re, Cx, Real};

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T: Real>(pub [[Cx<T>; 2]; 2]);

impl<T: Real> Mat2<T> {
    pub fn new(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn real(a: T, b: T, c: T, d: T) -> Self {
        Mat2::new(re(a), re(b), re(c), re(d))
    }

    pub fn identity() -> Self {
        Mat2::real(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zero() -> Self {
        Mat2::real(T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// J = [[0, −1], [1, 0]].
    pub fn j() -> Self {
        Mat2::real(T::zero(), -T::one(), T::one(), T::zero())
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn det(&self) -> Cx<T> {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().flatten().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn apply(&self, v: [Cx<T>; 2]) -> [Cx<T>; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, o: Mat2<T>) -> Mat2<T> {
        let (a, b) = (&self.0, &o.0);
        let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Mat2<T>;
    fn add(self, o: Mat2<T>) -> Mat2<T> {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Mat2<T>;
    fn sub(self, o: Mat2<T>) -> Mat2<T> {
        self + o.scale(re(-T::one()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition<T: Real> {
    /// g̃(a)cos α + g̃′(a)sin α = 0, g̃(b)cos β + g̃′(b)sin β = 0; `None` at a
    /// limit-point endpoint, where no condition is imposed.
    Separated { alpha: Option<T>, beta: Option<T> },
    /// (g̃(b), g̃′(b))ᵀ = e^{iφ}R(g̃(a), g̃′(a))ᵀ, R ∈ SL(2, ℝ).
    Coupled { phi: T, r: [[T; 2]; 2] },
    /// A(g̃(a), g̃′(a))ᵀ = B(g̃(b), g̃′(b))ᵀ.
    Matrix { a: Mat2<T>, b: Mat2<T> },
    /// g̃ = 0 at each retained (limit-circle) endpoint.
    Friedrichs { left: bool, right: bool },
}

#[derive(Debug, Clone)]
pub struct ValidityReport<T> {
    pub valid: bool,
    pub rank: usize,
    /// max |AJA* − BJB*| after normalizing (A B) by its largest entry.
    pub defect: T,
    pub reason: Option<String>,
}

const MATRIX_TOL: f64 = 1e-10;
const DET_TOL: f64 = 1e-12;

fn require_lc(classes: [EndpointClass; 2], what: &str) -> Result<()> {
    for side in [Side::Left, Side::Right] {
        if classes[side.index()] == EndpointClass::LimitPoint {
            return Err(Error::BoundaryCondition(format!("{what} refers to the {side} endpoint, which is limit point")));
        }
    }
    Ok(())
}

impl<T: Real> BoundaryCondition<T> {
    /// Separated conditions; an angle must be given exactly at the
    /// limit-circle endpoints.
    pub fn separated(alpha: Option<T>, beta: Option<T>, classes: [EndpointClass; 2]) -> Result<Self> {
        for (side, angle) in [(Side::Left, alpha), (Side::Right, beta)] {
            match (classes[side.index()], angle) {
                (EndpointClass::LimitPoint, Some(_)) => {
                    return Err(Error::BoundaryCondition(format!("no condition may be imposed at the limit-point {side} endpoint")))
                }
                (EndpointClass::LimitCircle, None) => {
                    return Err(Error::BoundaryCondition(format!("the limit-circle {side} endpoint needs an angle")))
                }
                (_, Some(t)) if !(t >= T::zero() && t < T::PI()) => {
                    return Err(Error::BoundaryCondition(format!("angle {t} outside [0, π)")))
                }
                _ => {}
            }
        }
        Ok(BoundaryCondition::Separated { alpha, beta })
    }

    pub fn coupled(phi: T, r: [[T; 2]; 2], classes: [EndpointClass; 2]) -> Result<Self> {
        require_lc(classes, "a coupled condition")?;
        if !(phi >= T::zero() && phi < T::PI() * T::lit(2.0)) {
            return Err(Error::BoundaryCondition(format!("phi = {phi} outside [0, 2π)")));
        }
        let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
        if (det - T::one()).abs() > T::lit(DET_TOL) {
            return Err(Error::BoundaryCondition(format!("det R = {det}, expected 1")));
        }
        Ok(BoundaryCondition::Coupled { phi, r })
    }

    /// General pair; validity is checked separately by [`validate`].
    pub fn matrix(a: Mat2<T>, b: Mat2<T>, classes: [EndpointClass; 2]) -> Result<Self> {
        require_lc(classes, "a matrix condition")?;
        Ok(BoundaryCondition::Matrix { a, b })
    }

    /// Embed as an (A, B) pair (only when both endpoints carry a condition).
    pub fn as_matrix(&self) -> Result<(Mat2<T>, Mat2<T>)> {
        let z = T::zero();
        match *self {
            BoundaryCondition::Separated { alpha: Some(al), beta: Some(be) } => Ok((
                Mat2::real(al.cos(), al.sin(), z, z),
                Mat2::real(z, z, -be.cos(), -be.sin()),
            )),
            BoundaryCondition::Friedrichs { left: true, right: true } => {
                Ok((Mat2::real(T::one(), z, z, z), Mat2::real(z, z, -T::one(), z)))
            }
            BoundaryCondition::Coupled { phi, r } => {
                let e = cx(phi.cos(), phi.sin());
                Ok((Mat2::real(r[0][0], r[0][1], r[1][0], r[1][1]).scale(e), Mat2::identity()))
            }
            BoundaryCondition::Matrix { a, b } => Ok((a, b)),
            _ => Err(Error::BoundaryCondition("condition drops an endpoint; no (A, B) form".into())),
        }
    }

    /// Which endpoints the condition involves.
    pub fn retains(&self, side: Side) -> bool {
        match *self {
            BoundaryCondition::Separated { alpha, beta } => match side {
                Side::Left => alpha.is_some(),
                Side::Right => beta.is_some(),
            },
            BoundaryCondition::Friedrichs { left, right } => match side {
                Side::Left => left,
                Side::Right => right,
            },
            _ => true,
        }
    }

    /// Separated angle at `side` (Friedrichs counts as angle 0).
    pub fn separated_angle(&self, side: Side) -> Option<T> {
        match *self {
            BoundaryCondition::Separated { alpha, beta } => match side {
                Side::Left => alpha,
                Side::Right => beta,
            },
            BoundaryCondition::Friedrichs { .. } if self.retains(side) => Some(T::zero()),
            _ => None,
        }
    }
}

/// rank(A B) = 2 and AJA* = BJB*; separated, coupled and Friedrichs
/// conditions are valid by construction.
pub fn validate<T: Real>(bc: &BoundaryCondition<T>) -> ValidityReport<T> {
    let (a, b) = match *bc {
        BoundaryCondition::Matrix { a, b } => (a, b),
        BoundaryCondition::Coupled { r, .. } => {
            let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
            let ok = (det - T::one()).abs() <= T::lit(DET_TOL);
            return ValidityReport {
                valid: ok,
                rank: 2,
                defect: (det - T::one()).abs(),
                reason: (!ok).then(|| format!("det R = {det}")),
            };
        }
        _ => return ValidityReport { valid: true, rank: 2, defect: T::zero(), reason: None },
    };
    let s = a.max_abs().max(b.max_abs());
    if s == T::zero() {
        return ValidityReport { valid: false, rank: 0, defect: T::zero(), reason: Some("A = B = 0".into()) };
    }
    let (a, b) = (a.scale(re(s.recip())), b.scale(re(s.recip())));
    // rank of the 2×4 block via its 2×2 minors
    let rows = [[a.0[0][0], a.0[0][1], b.0[0][0], b.0[0][1]], [a.0[1][0], a.0[1][1], b.0[1][0], b.0[1][1]]];
    let mut minor = T::zero();
    for i in 0..4 {
        for k in i + 1..4 {
            minor = minor.max((rows[0][i] * rows[1][k] - rows[0][k] * rows[1][i]).norm());
        }
    }
    let tol = T::lit(MATRIX_TOL);
    let rank = if minor > tol {
        2
    } else if rows.iter().flatten().any(|v| v.norm() > tol) {
        1
    } else {
        0
    };
    let j = Mat2::j();
    let defect = (a * j * a.adjoint() - b * j * b.adjoint()).max_abs();
    let mut reason = None;
    if rank < 2 {
        reason = Some(format!("rank(A B) = {rank}"));
    } else if defect > tol {
        reason = Some(format!("AJA* − BJB* has entries up to {defect}"));
    }
    ValidityReport { valid: reason.is_none(), rank, defect, reason }
}

fn pair<T: Real>(v: Option<&BoundaryValuePair<T>>, side: Side) -> Result<[Cx<T>; 2]> {
    let v = v.ok_or_else(|| Error::BoundaryCondition(format!("boundary values at the {side} endpoint are required")))?;
    if v.side != side {
        return Err(Error::Argument(format!("boundary values for {} passed as {side}", v.side)));
    }
    Ok([v.g_tilde, v.g_tilde_prime])
}

/// Residual of `bc` for an element with the given boundary values.
pub fn residual<T: Real>(
    bc: &BoundaryCondition<T>,
    at_a: Option<&BoundaryValuePair<T>>,
    at_b: Option<&BoundaryValuePair<T>>,
) -> Result<Vec<Cx<T>>> {
    match *bc {
        BoundaryCondition::Separated { alpha, beta } => {
            let mut out = Vec::new();
            if let Some(al) = alpha {
                let g = pair(at_a, Side::Left)?;
                out.push(g[0] * al.cos() + g[1] * al.sin());
            }
            if let Some(be) = beta {
                let g = pair(at_b, Side::Right)?;
                out.push(g[0] * be.cos() + g[1] * be.sin());
            }
            Ok(out)
        }
        BoundaryCondition::Friedrichs { left, right } => {
            let mut out = Vec::new();
            if left {
                out.push(pair(at_a, Side::Left)?[0]);
            }
            if right {
                out.push(pair(at_b, Side::Right)?[0]);
            }
            Ok(out)
        }
        BoundaryCondition::Coupled { phi, r } => {
            let (ga, gb) = (pair(at_a, Side::Left)?, pair(at_b, Side::Right)?);
            let rg = Mat2::real(r[0][0], r[0][1], r[1][0], r[1][1]).scale(cx(phi.cos(), phi.sin())).apply(ga);
            Ok(vec![gb[0] - rg[0], gb[1] - rg[1]])
        }
        BoundaryCondition::Matrix { a, b } => {
            let (ga, gb) = (pair(at_a, Side::Left)?, pair(at_b, Side::Right)?);
            let (x, y) = (a.apply(ga), b.apply(gb));
            Ok(vec![x[0] - y[0], x[1] - y[1]])
        }
    }
}

/// Friedrichs extension: g̃ = 0 at every limit-circle endpoint.
pub fn friedrichs<T: Real>(classes: [EndpointClass; 2]) -> BoundaryCondition<T> {
    BoundaryCondition::Friedrichs {
        left: classes[0] == EndpointClass::LimitCircle,
        right: classes[1] == EndpointClass::LimitCircle,
    }
}

/// [`friedrichs`] from classifier reports; inconclusive verdicts are refused.
pub fn friedrichs_from_reports<T: Real>(left: &EndpointReport<T>, right: &EndpointReport<T>) -> Result<BoundaryCondition<T>> {
    let class = |r: &EndpointReport<T>| match r.verdict {
        Verdict::LimitCircle => Ok(EndpointClass::LimitCircle),
        Verdict::LimitPoint => Ok(EndpointClass::LimitPoint),
        Verdict::Inconclusive => Err(Error::Inconclusive(format!("{} endpoint: {}", r.side, r.note))),
    };
    Ok(friedrichs([class(left)?, class(right)?]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvals::Route;
    use EndpointClass::{LimitCircle as Lc, LimitPoint as Lp};

    fn bv(side: Side, g: f64, gp: f64) -> BoundaryValuePair<f64> {
        BoundaryValuePair { side, g_tilde: re(g), g_tilde_prime: re(gp), route: Route::Wronskian, convergence_estimate: 0.0 }
    }

    #[test]
    fn diagonal_matrix_pair_is_valid() {
        let bc = BoundaryCondition::matrix(Mat2::real(1.0, 0.0, 0.0, 0.0), Mat2::real(0.0, 0.0, 0.0, 1.0), [Lc, Lc]).unwrap();
        let r = validate(&bc);
        assert!(r.valid && r.rank == 2, "{r:?}");
    }

    #[test]
    fn periodic_is_valid_and_scaling_is_not() {
        let per = BoundaryCondition::coupled(0.0, [[1.0, 0.0], [0.0, 1.0]], [Lc, Lc]).unwrap();
        assert!(validate(&per).valid);
        let bad = BoundaryCondition::matrix(Mat2::identity(), Mat2::identity().scale(re(2.0)), [Lc, Lc]).unwrap();
        assert!(!validate(&bad).valid);
    }

    #[test]
    fn residual_examples() {
        let sep = BoundaryCondition::separated(Some(0.0), None, [Lc, Lp]).unwrap();
        assert_eq!(residual(&sep, Some(&bv(Side::Left, 0.0, 5.0)), None).unwrap(), vec![re(0.0)]);
        let anti = BoundaryCondition::coupled(std::f64::consts::PI, [[1.0, 0.0], [0.0, 1.0]], [Lc, Lc]).unwrap();
        let r = residual(&anti, Some(&bv(Side::Left, 1.0, 2.0)), Some(&bv(Side::Right, -1.0, -2.0))).unwrap();
        assert!(r.iter().all(|v| v.norm() < 1e-15));
        let f = friedrichs::<f64>([Lc, Lc]);
        let r = residual(&f, Some(&bv(Side::Left, 0.0, 1.0)), Some(&bv(Side::Right, 0.0, 1.0))).unwrap();
        assert_eq!(r, vec![re(0.0), re(0.0)]);
        assert!(residual(&f, Some(&bv(Side::Left, 0.0, 1.0)), None).is_err());
    }

    #[test]
    fn limit_point_components_rejected() {
        assert!(BoundaryCondition::separated(Some(0.0), Some(0.0), [Lc, Lp]).is_err());
        assert!(BoundaryCondition::separated(None::<f64>, None, [Lc, Lp]).is_err());
        assert!(BoundaryCondition::coupled(0.0, [[1.0, 0.0], [0.0, 1.0]], [Lc, Lp]).is_err());
        assert!(BoundaryCondition::matrix(Mat2::<f64>::identity(), Mat2::identity(), [Lp, Lc]).is_err());
    }

    #[test]
    fn friedrichs_drops_limit_point_ends() {
        assert_eq!(friedrichs::<f64>([Lc, Lp]), BoundaryCondition::Friedrichs { left: true, right: false });
        assert!(!friedrichs::<f64>([Lc, Lp]).retains(Side::Right));
    }

    #[test]
    fn det_check_on_coupled() {
        assert!(BoundaryCondition::coupled(0.5, [[2.0, 0.0], [0.0, 1.0]], [Lc, Lc]).is_err());
    }
}
