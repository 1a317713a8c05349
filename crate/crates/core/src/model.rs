//! Problem description, solution states and Wronskians.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Extended-real endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound<T> {
    NegInfinity,
    Finite(T),
    PosInfinity,
}

impl<T: Real> Bound<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Bound::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    fn rank(self) -> (i8, T) {
        match self {
            Bound::NegInfinity => (-1, T::zero()),
            Bound::Finite(v) => (0, v),
            Bound::PosInfinity => (1, T::zero()),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Bound::NegInfinity => f64::NEG_INFINITY,
            Bound::Finite(v) => v.as_f64(),
            Bound::PosInfinity => f64::INFINITY,
        }
    }
}

impl<T: Real> fmt::Display for Bound<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInfinity => write!(f, "-inf"),
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::PosInfinity => write!(f, "+inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EndpointClass {
    LimitCircle,
    LimitPoint,
}

/// Leading-order behaviour of the coefficients at an endpoint, as supplied by
/// the catalog: p ~ p_coeff·t^p_exponent and q/r ~ q_coeff·t^q_exponent with
/// t the distance to the endpoint (or x itself at infinity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointAsymptotics<T> {
    pub p_exponent: T,
    pub p_coeff: T,
    pub q_exponent: T,
    pub q_coeff: T,
    /// Classification known analytically; enables real-z classification.
    pub known_class: Option<EndpointClass>,
}

pub type Coefficient<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// τu = r⁻¹[−(p u′)′ + q u] on (a, b).
#[derive(Clone)]
pub struct SlProblem<T> {
    pub a: Bound<T>,
    pub b: Bound<T>,
    p: Coefficient<T>,
    q: Coefficient<T>,
    r: Coefficient<T>,
    pub name: Option<String>,
    pub params: Vec<(String, f64)>,
    pub asymptotics: [Option<EndpointAsymptotics<T>>; 2],
}

impl<T: Real> fmt::Debug for SlProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SlProblem")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("name", &self.name)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl<T: Real> SlProblem<T> {
    pub fn new<P, Q, R>(a: Bound<T>, b: Bound<T>, p: P, q: Q, r: R) -> Result<Self>
    where
        P: Fn(T) -> T + Send + Sync + 'static,
        Q: Fn(T) -> T + Send + Sync + 'static,
        R: Fn(T) -> T + Send + Sync + 'static,
    {
        if a.rank() >= b.rank() || a == Bound::PosInfinity || b == Bound::NegInfinity {
            return Err(Error::Argument(format!("need a < b, got ({a}, {b})")));
        }
        Ok(SlProblem {
            a,
            b,
            p: Arc::new(p),
            q: Arc::new(q),
            r: Arc::new(r),
            name: None,
            params: Vec::new(),
            asymptotics: [None, None],
        })
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.to_string(), value));
        self
    }

    pub fn with_asymptotics(mut self, side: Side, asy: EndpointAsymptotics<T>) -> Self {
        self.asymptotics[side.index()] = Some(asy);
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn endpoint(&self, side: Side) -> Bound<T> {
        match side {
            Side::Left => self.a,
            Side::Right => self.b,
        }
    }

    pub fn contains(&self, x: T) -> bool {
        if !x.is_finite() {
            return false;
        }
        let above = match self.a {
            Bound::Finite(a) => x > a,
            _ => true,
        };
        let below = match self.b {
            Bound::Finite(b) => x < b,
            _ => true,
        };
        above && below
    }

    pub fn check_interior(&self, x: T) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                x: x.as_f64(),
                a: self.a.as_f64(),
                b: self.b.as_f64(),
            })
        }
    }

    /// (p, q, r) at an interior point, with positivity enforced.
    pub fn coefficients(&self, x: T) -> Result<(T, T, T)> {
        self.check_interior(x)?;
        let p = (self.p)(x);
        let q = (self.q)(x);
        let r = (self.r)(x);
        if !(p > T::zero()) || !p.is_finite() {
            return Err(coef_err("p", x, p));
        }
        if !(r > T::zero()) || !r.is_finite() {
            return Err(coef_err("r", x, r));
        }
        if !q.is_finite() {
            return Err(coef_err("q", x, q));
        }
        Ok((p, q, r))
    }

    pub fn p(&self, x: T) -> Result<T> {
        Ok(self.coefficients(x)?.0)
    }

    pub fn q(&self, x: T) -> Result<T> {
        Ok(self.coefficients(x)?.1)
    }

    pub fn r(&self, x: T) -> Result<T> {
        Ok(self.coefficients(x)?.2)
    }

    /// Distance from x to the nearest finite endpoint (infinite if none).
    pub fn distance_to_finite_endpoint(&self, x: T) -> T {
        let mut d = T::infinity();
        if let Bound::Finite(a) = self.a {
            d = d.min(x - a);
        }
        if let Bound::Finite(b) = self.b {
            d = d.min(b - x);
        }
        d
    }

    /// Length of the interval, infinite for unbounded ones.
    pub fn length(&self) -> T {
        match (self.a, self.b) {
            (Bound::Finite(a), Bound::Finite(b)) => b - a,
            _ => T::infinity(),
        }
    }
}

fn coef_err<T: Real>(name: &'static str, x: T, v: T) -> Error {
    Error::Coefficient {
        name,
        x: x.as_f64(),
        value: v.as_f64(),
    }
}

/// Value and quasi-derivative u1 = p·u′ at x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionState<T> {
    pub x: T,
    pub u: Cx<T>,
    pub u1: Cx<T>,
}

impl<T: Real> SolutionState<T> {
    pub fn new(x: T, u: Cx<T>, u1: Cx<T>) -> Self {
        SolutionState { x, u, u1 }
    }

    pub fn real(x: T, u: T, u1: T) -> Self {
        SolutionState {
            x,
            u: Cx::new(u, T::zero()),
            u1: Cx::new(u1, T::zero()),
        }
    }

    pub fn scale(self, c: Cx<T>) -> Self {
        SolutionState { x: self.x, u: self.u * c, u1: self.u1 * c }
    }

    /// a·self + b·other; both states must sit at the same x.
    pub fn combine(self, a: Cx<T>, other: Self, b: Cx<T>) -> Self {
        SolutionState {
            x: self.x,
            u: self.u * a + other.u * b,
            u1: self.u1 * a + other.u1 * b,
        }
    }

    pub fn magnitude(&self) -> T {
        self.u.norm().max(self.u1.norm())
    }
}

fn same_point<T: Real>(x: T, y: T) -> bool {
    (x - y).abs() <= T::lit(8.0) * T::epsilon() * T::one().max(x.abs())
}

/// W(f, g) = f·g1 − f1·g.
pub fn wronskian<T: Real>(f: &SolutionState<T>, g: &SolutionState<T>) -> Result<Cx<T>> {
    if !same_point(f.x, g.x) {
        return Err(Error::Argument(format!(
            "Wronskian of states at different points {} and {}",
            f.x, g.x
        )));
    }
    Ok(f.u * g.u1 - f.u1 * g.u)
}

/// τ applied to u given (p u′)′ as `u1_deriv`.
pub fn apply_tau<T: Real>(
    problem: &SlProblem<T>,
    x: T,
    u: Cx<T>,
    _u1: Cx<T>,
    u1_deriv: Cx<T>,
) -> Result<Cx<T>> {
    let (_, q, r) = problem.coefficients(x)?;
    Ok((u * q - u1_deriv) / r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Accepted steps of one integration run, in integration order.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub states: Vec<SolutionState<T>>,
    pub z: Cx<T>,
    pub direction: Direction,
}

impl<T: Real> Trajectory<T> {
    pub fn first(&self) -> &SolutionState<T> {
        &self.states[0]
    }

    pub fn last(&self) -> &SolutionState<T> {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}
