//! Evaluable solution handles shared across threads.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::integrator::{drive, IntegratorConfig, Standard};
use crate::model::{SlProblem, SolutionState};
use crate::scalar::{Cx, Real};

/// A solution of τu = z u known on an open sub-interval (lo, hi).
pub trait Solution<T: Real>: Send + Sync {
    fn eval(&self, x: T) -> Result<SolutionState<T>>;
    fn range(&self) -> (T, T);
    fn z(&self) -> Cx<T>;
}

#[derive(Clone)]
pub struct SolutionHandle<T: Real>(Arc<dyn Solution<T>>);

impl<T: Real> fmt::Debug for SolutionHandle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.range();
        write!(f, "SolutionHandle(z = {}, range = ({lo}, {hi}))", self.z())
    }
}

impl<T: Real> SolutionHandle<T> {
    pub fn new<S: Solution<T> + 'static>(s: S) -> Self {
        SolutionHandle(Arc::new(s))
    }

    pub fn eval(&self, x: T) -> Result<SolutionState<T>> {
        let (lo, hi) = self.range();
        if !(x > lo && x < hi) {
            return Err(Error::Domain { x: x.as_f64(), a: lo.as_f64(), b: hi.as_f64() });
        }
        self.0.eval(x)
    }

    pub fn range(&self) -> (T, T) {
        self.0.range()
    }

    pub fn z(&self) -> Cx<T> {
        self.0.z()
    }

    /// Closed-form solution given by a state-valued function.
    pub fn closed<F>(z: Cx<T>, lo: T, hi: T, f: F) -> Self
    where
        F: Fn(T) -> Result<SolutionState<T>> + Send + Sync + 'static,
    {
        SolutionHandle::new(ClosedForm { z, lo, hi, f: Box::new(f) })
    }

    /// Σ cᵢ·hᵢ over handles sharing z; the range is the intersection.
    pub fn combination(terms: Vec<(Cx<T>, SolutionHandle<T>)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::Argument("empty combination".into()));
        };
        let z = first.z();
        for (_, h) in &terms {
            if (h.z() - z).norm() > T::lit(1e-12) * T::one().max(z.norm()) {
                return Err(Error::Argument("combined solutions must share z".into()));
            }
        }
        Ok(SolutionHandle::new(Combination { z, terms }))
    }

    pub fn scaled(&self, c: Cx<T>) -> Self {
        SolutionHandle::new(Combination { z: self.z(), terms: vec![(c, self.clone())] })
    }

    /// Pieces glued at increasing breakpoints: piece i serves
    /// breaks[i−1] < x ≤ breaks[i]. Pieces are evaluated without their own
    /// range check so that shared breakpoints need no overlap.
    pub fn piecewise(pieces: Vec<SolutionHandle<T>>, breaks: Vec<T>) -> Result<Self> {
        if pieces.is_empty() || breaks.len() + 1 != pieces.len() {
            return Err(Error::Argument("piecewise handle needs one more piece than breakpoints".into()));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Argument("breakpoints must increase".into()));
        }
        let lo = pieces[0].range().0;
        let hi = pieces[pieces.len() - 1].range().1;
        Ok(SolutionHandle::new(Piecewise { z: pieces[0].z(), pieces, breaks, lo, hi }))
    }
}

struct Piecewise<T: Real> {
    z: Cx<T>,
    pieces: Vec<SolutionHandle<T>>,
    breaks: Vec<T>,
    lo: T,
    hi: T,
}

impl<T: Real> Solution<T> for Piecewise<T> {
    fn eval(&self, x: T) -> Result<SolutionState<T>> {
        let i = self.breaks.partition_point(|b| *b < x);
        self.pieces[i].0.eval(x)
    }
    fn range(&self) -> (T, T) {
        (self.lo, self.hi)
    }
    fn z(&self) -> Cx<T> {
        self.z
    }
}

struct ClosedForm<T: Real> {
    z: Cx<T>,
    lo: T,
    hi: T,
    f: Box<dyn Fn(T) -> Result<SolutionState<T>> + Send + Sync>,
}

impl<T: Real> Solution<T> for ClosedForm<T> {
    fn eval(&self, x: T) -> Result<SolutionState<T>> {
        let mut s = (self.f)(x)?;
        s.x = x;
        Ok(s)
    }
    fn range(&self) -> (T, T) {
        (self.lo, self.hi)
    }
    fn z(&self) -> Cx<T> {
        self.z
    }
}

struct Combination<T: Real> {
    z: Cx<T>,
    terms: Vec<(Cx<T>, SolutionHandle<T>)>,
}

impl<T: Real> Solution<T> for Combination<T> {
    fn eval(&self, x: T) -> Result<SolutionState<T>> {
        let zero = Cx::new(T::zero(), T::zero());
        let mut acc = SolutionState::new(x, zero, zero);
        for (c, h) in &self.terms {
            let s = h.eval(x)?;
            acc.u = acc.u + s.u * c;
            acc.u1 = acc.u1 + s.u1 * c;
        }
        Ok(acc)
    }
    fn range(&self) -> (T, T) {
        self.terms.iter().fold((T::neg_infinity(), T::infinity()), |(lo, hi), (_, h)| {
            let (l, r) = h.range();
            (lo.max(l), hi.min(r))
        })
    }
    fn z(&self) -> Cx<T> {
        self.z
    }
}

/// Where an integrated handle starts its short hops from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopFrom {
    Nearest,
    /// Only from stored states left of x (stable for solutions decaying leftward).
    Below,
    /// Only from stored states right of x.
    Above,
}

/// Solution represented by stored states; other points are reached by short
/// integration hops from a stored state.
pub struct Integrated<T: Real> {
    problem: SlProblem<T>,
    z: Cx<T>,
    states: Vec<SolutionState<T>>,
    cfg: IntegratorConfig<T>,
    hop: HopFrom,
    lo: T,
    hi: T,
}

impl<T: Real> Integrated<T> {
    /// `states` in any order; range defaults to the span of the stored points
    /// unless widened with [`Integrated::with_range`].
    pub fn new(problem: SlProblem<T>, z: Cx<T>, mut states: Vec<SolutionState<T>>, cfg: IntegratorConfig<T>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Argument("no stored states".into()));
        }
        states.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
        states.dedup_by(|a, b| a.x == b.x);
        let lo = states[0].x;
        let hi = states[states.len() - 1].x;
        let eps = T::epsilon() * T::lit(4.0);
        Ok(Integrated {
            problem,
            z,
            states,
            cfg,
            hop: HopFrom::Nearest,
            lo: lo - eps * T::one().max(lo.abs()),
            hi: hi + eps * T::one().max(hi.abs()),
        })
    }

    pub fn with_hop(mut self, hop: HopFrom) -> Self {
        self.hop = hop;
        self
    }

    pub fn with_range(mut self, lo: T, hi: T) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    pub fn into_handle(self) -> SolutionHandle<T> {
        SolutionHandle::new(self)
    }
}

impl<T: Real> Solution<T> for Integrated<T> {
    fn eval(&self, x: T) -> Result<SolutionState<T>> {
        let idx = self.states.partition_point(|s| s.x < x);
        let below = idx.checked_sub(1).map(|i| &self.states[i]);
        let above = self.states.get(idx);
        if let Some(s) = above {
            if s.x == x {
                return Ok(*s);
            }
        }
        let start = match (self.hop, below, above) {
            (HopFrom::Below, Some(b), _) => b,
            (HopFrom::Above, _, Some(a)) => a,
            (HopFrom::Nearest, Some(b), Some(a)) => {
                if x - b.x <= a.x - x {
                    b
                } else {
                    a
                }
            }
            (_, Some(b), None) => b,
            (_, None, Some(a)) => a,
            (_, None, None) => unreachable!("states are never empty"),
        };
        let sys = Standard { problem: &self.problem, z: self.z, fraction: self.cfg.endpoint_fraction };
        let y = drive(&sys, start.x, [start.u, start.u1], &[x], &self.cfg, |_, _, _| {})?;
        Ok(SolutionState::new(x, y[0], y[1]))
    }
    fn range(&self) -> (T, T) {
        (self.lo, self.hi)
    }
    fn z(&self) -> Cx<T> {
        self.z
    }
}
