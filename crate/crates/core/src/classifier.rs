//! Limit-circle / limit-point classification and nonoscillation probes.

use crate::error::{Error, Result};
use crate::integrator::{drive, IntegratorConfig, Standard, Vec2};
use crate::model::{Bound, EndpointClass, Side, SlProblem};
use crate::quadrature::gk15_nodes;
use crate::scalar::{re, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    LimitCircle,
    LimitPoint,
    Inconclusive,
}

impl From<EndpointClass> for Verdict {
    fn from(c: EndpointClass) -> Self {
        match c {
            EndpointClass::LimitCircle => Verdict::LimitCircle,
            EndpointClass::LimitPoint => Verdict::LimitPoint,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::LimitCircle => "LimitCircle",
            Verdict::LimitPoint => "LimitPoint",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifierConfig<T> {
    pub integrator: IntegratorConfig<T>,
    /// Windows toward a finite endpoint (each halves the distance).
    pub finite_windows: usize,
    /// Windows toward an infinite endpoint (each doubles the width).
    pub infinite_windows: usize,
    pub ratio_threshold: T,
    pub consecutive: usize,
    /// Sub-panels per window for the ∫|u|²r quadrature.
    pub subpanels: usize,
}

impl<T: Real> Default for ClassifierConfig<T> {
    fn default() -> Self {
        ClassifierConfig {
            integrator: IntegratorConfig::with_tolerances(T::lit(1e-8).max(T::epsilon() * T::lit(64.0)), T::lit(1e-12)),
            finite_windows: 30,
            infinite_windows: 8,
            ratio_threshold: T::lit(0.99),
            consecutive: 6,
            subpanels: 4,
        }
    }
}

/// ∫|u|²r over the probe windows for one solution.
#[derive(Debug, Clone)]
pub struct TailEstimate<T> {
    /// Initial (u, u1) at the anchor.
    pub initial: (T, T),
    /// ln ∫_window |u|² r, window by window toward the endpoint.
    pub log_window_integrals: Vec<T>,
    /// Some(true) convergent, Some(false) divergent, None ambiguous.
    pub convergent: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct EndpointReport<T> {
    pub side: Side,
    pub verdict: Verdict,
    pub z_used: Cx<T>,
    pub l2_tail_estimates: Vec<TailEstimate<T>>,
    /// Sign changes observed at λ = Re z (None when not probed).
    pub oscillatory: Option<bool>,
    /// Window boundaries used, anchor first.
    pub windows: Vec<T>,
    pub note: String,
}

/// Window boundaries from an interior anchor toward the endpoint.
pub(crate) fn probe_windows<T: Real>(problem: &SlProblem<T>, side: Side, count: usize) -> Vec<T> {
    let two = T::lit(2.0);
    match problem.endpoint(side) {
        Bound::Finite(d) => {
            let len = problem.length();
            let eps0 = if len.is_finite() { (len * T::lit(0.25)).min(T::one()) } else { T::one() };
            let toward = if side == Side::Left { T::one() } else { -T::one() };
            // 1 + x style cancellation in the coefficients near d ≠ 0 makes the
            // step controller chase rounding noise below ~1e9·ε·|d|
            let limit = T::lit(1e9) * T::epsilon() * d.abs();
            (0..=count)
                .map(|k| eps0 * two.powi(-(k as i32)))
                .take_while(|&e| e > limit)
                .map(|e| d + toward * e)
                .collect()
        }
        _ => {
            let (outward, other) = match side {
                Side::Right => (T::one(), problem.a),
                Side::Left => (-T::one(), problem.b),
            };
            let x0 = match other {
                Bound::Finite(o) => o + outward * T::one().max(o.abs()),
                _ => T::zero(),
            };
            let s = T::one().max(x0.abs());
            (0..=count).map(|k| x0 + outward * s * (two.powi(k as i32) - T::one())).collect()
        }
    }
}

fn renormalize<T: Real>(y: &mut Vec2<T>) -> T {
    let n = y[0].norm().max(y[1].norm());
    if n > T::zero() && n.is_finite() {
        y[0] = y[0] / n;
        y[1] = y[1] / n;
        n.ln()
    } else {
        T::zero()
    }
}

fn log_add<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn window_integrals<T: Real>(
    problem: &SlProblem<T>,
    z: Cx<T>,
    initial: Vec2<T>,
    windows: &[T],
    cfg: &ClassifierConfig<T>,
) -> Result<Vec<T>> {
    let sys = Standard { problem, z, fraction: cfg.integrator.endpoint_fraction };
    let mut y = initial;
    let mut log_scale = renormalize(&mut y);
    let mut out = Vec::with_capacity(windows.len());
    for w in windows.windows(2) {
        let (from, to) = (w[0], w[1]);
        let mut nodes = Vec::new();
        let sub = T::from_usize(cfg.subpanels).unwrap();
        for j in 0..cfg.subpanels {
            let jj = T::from_usize(j).unwrap();
            let a = from + (to - from) * jj / sub;
            let b = from + (to - from) * (jj + T::one()) / sub;
            // nodes come ordered from a to b; |w| since the window integral is unoriented
            nodes.extend(gk15_nodes(a, b).into_iter().map(|(x, w)| (x, w.abs())));
        }
        let targets: Vec<T> = nodes.iter().map(|n| n.0).chain(std::iter::once(to)).collect();
        let mut logs = Vec::with_capacity(nodes.len());
        let y_end = drive(&sys, from, y, &targets, &cfg.integrator, |x, v, hit| {
            if hit && logs.len() < nodes.len() {
                logs.push((x, v[0]));
            }
        })?;
        let mut acc = T::neg_infinity();
        for ((_, w), (x, u)) in nodes.iter().zip(logs) {
            let r = problem.r(x)?;
            let n2 = u.norm_sqr();
            if n2 > T::zero() {
                acc = log_add(acc, n2.ln() + r.ln() + w.ln());
            }
        }
        out.push(acc + log_scale * T::lit(2.0));
        y = y_end;
        log_scale = log_scale + renormalize(&mut y);
    }
    Ok(out)
}

fn tail_verdict<T: Real>(logs: &[T], cfg: &ClassifierConfig<T>) -> Option<bool> {
    let n = logs.len();
    if n < cfg.consecutive + 1 {
        return None;
    }
    let lt = cfg.ratio_threshold.ln();
    let ratios: Vec<T> = logs[n - cfg.consecutive - 1..].windows(2).map(|w| w[1] - w[0]).collect();
    if ratios.iter().all(|&r| r < lt) {
        Some(true)
    } else if ratios.iter().all(|&r| r >= lt) {
        Some(false)
    } else {
        None
    }
}

/// Weyl-alternative classification at `side` using two solutions at z.
pub fn classify_endpoint<T: Real>(
    problem: &SlProblem<T>,
    side: Side,
    z: Cx<T>,
    cfg: &ClassifierConfig<T>,
) -> Result<EndpointReport<T>> {
    if z.im == T::zero() {
        let known = problem.asymptotics[side.index()].and_then(|a| a.known_class);
        return match known {
            Some(c) => Ok(EndpointReport {
                side,
                verdict: c.into(),
                z_used: z,
                l2_tail_estimates: Vec::new(),
                oscillatory: None,
                windows: Vec::new(),
                note: "real z: verdict taken from catalog asymptotics".into(),
            }),
            None => Err(Error::Argument(
                "real z needs catalog-supplied endpoint asymptotics; use Im z ≠ 0".into(),
            )),
        };
    }
    let count = if problem.endpoint(side).is_finite() { cfg.finite_windows } else { cfg.infinite_windows };
    let windows = probe_windows(problem, side, count);
    let mut tails = Vec::new();
    let mut note = String::new();
    for init in [(T::one(), T::zero()), (T::zero(), T::one())] {
        let y0 = [re(init.0), re(init.1)];
        match window_integrals(problem, z, y0, &windows, cfg) {
            Ok(logs) => {
                let convergent = tail_verdict(&logs, cfg);
                tails.push(TailEstimate { initial: init, log_window_integrals: logs, convergent });
            }
            Err(e) => {
                note = format!("integration failed: {e}");
                tails.push(TailEstimate { initial: init, log_window_integrals: Vec::new(), convergent: None });
            }
        }
    }
    let verdict = if tails.iter().any(|t| t.convergent == Some(false)) {
        Verdict::LimitPoint
    } else if tails.iter().all(|t| t.convergent == Some(true)) {
        Verdict::LimitCircle
    } else {
        if note.is_empty() {
            note = "window ratios straddle the threshold".into();
        }
        Verdict::Inconclusive
    };
    if note.is_empty() {
        note = format!(
            "{} windows from {} toward {}; ratio threshold {} over {} windows",
            windows.len().saturating_sub(1),
            windows[0],
            problem.endpoint(side),
            cfg.ratio_threshold,
            cfg.consecutive
        );
    }
    let oscillatory = is_nonoscillatory(problem, side, z.re, cfg).ok().map(|b| !b);
    Ok(EndpointReport { side, verdict, z_used: z, l2_tail_estimates: tails, oscillatory, windows, note })
}

/// 2 for LC/LC, 1 for exactly one LC, 0 for LP/LP.
pub fn deficiency_indices<T: Real>(left: &EndpointReport<T>, right: &EndpointReport<T>) -> Result<usize> {
    let mut n = 0;
    for r in [left, right] {
        match r.verdict {
            Verdict::LimitCircle => n += 1,
            Verdict::LimitPoint => {}
            Verdict::Inconclusive => {
                return Err(Error::Inconclusive(format!("{} endpoint: {}", r.side, r.note)))
            }
        }
    }
    Ok(n)
}

/// Sign changes of a real solution per probe window at λ.
#[derive(Debug, Clone)]
pub struct OscillationProbe<T> {
    pub lambda: T,
    pub windows: Vec<T>,
    pub sign_changes: Vec<usize>,
    pub nonoscillatory: bool,
}

pub fn oscillation_probe<T: Real>(
    problem: &SlProblem<T>,
    side: Side,
    lambda: T,
    cfg: &ClassifierConfig<T>,
) -> Result<OscillationProbe<T>> {
    let count = if problem.endpoint(side).is_finite() { 2 * cfg.finite_windows } else { cfg.infinite_windows };
    let windows = probe_windows(problem, side, count);
    let sys = Standard { problem, z: re(lambda), fraction: cfg.integrator.endpoint_fraction };
    let mut y = [re(T::one()), re(T::zero())];
    let mut counts = Vec::with_capacity(windows.len());
    for w in windows.windows(2) {
        let mut changes = 0;
        let mut prev = y[0].re;
        y = drive(&sys, w[0], y, &[w[1]], &cfg.integrator, |_, v, _| {
            let s = v[0].re;
            if s != T::zero() {
                if prev != T::zero() && (s > T::zero()) != (prev > T::zero()) {
                    changes += 1;
                }
                prev = s;
            }
        })?;
        renormalize(&mut y);
        counts.push(changes);
    }
    let tail = (counts.len() / 2).max(cfg.consecutive).min(counts.len());
    let nonoscillatory = counts[counts.len() - tail..].iter().all(|&c| c == 0);
    Ok(OscillationProbe { lambda, windows, sign_changes: counts, nonoscillatory })
}

/// True when a real solution at λ stops changing sign toward the endpoint
/// (best effort: slow log-periodic oscillation can escape the probe).
pub fn is_nonoscillatory<T: Real>(
    problem: &SlProblem<T>,
    side: Side,
    lambda: T,
    cfg: &ClassifierConfig<T>,
) -> Result<bool> {
    Ok(oscillation_probe(problem, side, lambda, cfg)?.nonoscillatory)
}
