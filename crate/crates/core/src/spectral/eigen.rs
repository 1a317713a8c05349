//! Separated-condition eigenvalues: sign-change scan of the characteristic
//! function plus bisection.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extensions::BoundaryCondition;
use crate::integrator::{drive, Standard};
use crate::model::{wronskian, Side, SolutionState};
use crate::scalar::{re, Real};

use super::layer::{advance, left_at_match, right_limit, to_state};
use super::{SpectralConfig, SpectralSetup};

#[derive(Debug, Clone)]
pub struct BracketInfo<T> {
    pub requested: (T, T),
    /// Window actually scanned (differs from `requested` after widening).
    pub window: (T, T),
    pub panels: usize,
    pub widened: bool,
    /// Final truncation point at a limit-point b.
    pub truncation: Option<T>,
    /// Bisection steps spent on each eigenvalue.
    pub bisection_steps: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Eigenlist<T> {
    pub eigenvalues: Vec<T>,
    /// |D(λ_k)| relative to the larger |D| half a scan panel away.
    pub characteristic_residuals: Vec<T>,
    pub bracket_info: BracketInfo<T>,
}

/// D(λ): right-end residual of φ_α(λ, ·); against a Dirichlet solution at
/// `trunc` when b is limit point.
pub(crate) fn characteristic<T: Real>(
    setup: &SpectralSetup<T>,
    alpha: T,
    beta: Option<T>,
    lambda: T,
    trunc: Option<T>,
    cfg: &SpectralConfig<T>,
) -> Result<T> {
    let z = re(lambda);
    let (v, _) = left_at_match(setup, [re(-alpha.sin()), re(alpha.cos())], z, cfg)?;
    let sl = to_state(&setup.basis_a, setup.x_left, v)?;
    match (beta, trunc) {
        (Some(beta), _) => {
            let sr = advance(&setup.problem, z, &sl, setup.x_right, &cfg.integrator)?;
            let (w, _) = right_limit(setup, &sr, z, cfg)?;
            Ok((w[0] * beta.cos() + w[1] * beta.sin()).re)
        }
        (None, Some(x)) => {
            let sys = Standard { problem: &setup.problem, z, fraction: cfg.integrator.endpoint_fraction };
            let y = drive(&sys, x, [re(T::zero()), re(T::one())], &[setup.x_left], &cfg.integrator, |_, _, _| {})?;
            Ok(wronskian(&sl, &SolutionState::new(setup.x_left, y[0], y[1]))?.re)
        }
        (None, None) => Err(Error::Argument("limit-point right endpoint needs a truncation point".into())),
    }
}

fn angles<T: Real>(setup: &SpectralSetup<T>, bc: &BoundaryCondition<T>) -> Result<(T, Option<T>)> {
    match bc {
        BoundaryCondition::Separated { .. } | BoundaryCondition::Friedrichs { .. } => {}
        _ => return Err(Error::Unsupported("eigenvalues for coupled or general (A, B) conditions".into())),
    }
    let alpha = bc
        .separated_angle(Side::Left)
        .ok_or_else(|| Error::BoundaryCondition("no condition at the limit-circle left endpoint".into()))?;
    let beta = if setup.lc_right() {
        Some(
            bc.separated_angle(Side::Right)
                .ok_or_else(|| Error::BoundaryCondition("no condition at the limit-circle right endpoint".into()))?,
        )
    } else {
        if bc.retains(Side::Right) {
            return Err(Error::BoundaryCondition("condition imposed at the limit-point right endpoint".into()));
        }
        None
    };
    Ok((alpha, beta))
}

fn bisect<T: Real, F: Fn(T) -> Result<T>>(f: &F, mut lo: T, mut hi: T, mut flo: T, cfg: &SpectralConfig<T>) -> Result<(T, usize)> {
    let half = T::lit(0.5);
    let mut steps = 0;
    loop {
        let mid = (lo + hi) * half;
        let tol = (cfg.root_rel_tol * mid.abs()).max(cfg.root_abs_tol);
        if hi - lo <= tol || steps >= 200 {
            return Ok((mid, steps));
        }
        let fm = f(mid)?;
        steps += 1;
        if fm == T::zero() {
            return Ok((mid, steps));
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
}

fn eval_all<T: Real, F: Fn(T) -> Result<T> + Sync>(f: &F, xs: &[T], parallel: bool) -> Result<Vec<T>> {
    if parallel {
        xs.par_iter().map(|&x| f(x)).collect()
    } else {
        xs.iter().map(|&x| f(x)).collect()
    }
}

fn median_abs<T: Real>(v: &[T]) -> T {
    let mut a: Vec<T> = v.iter().map(|x| x.abs()).filter(|x| x.is_finite()).collect();
    if a.is_empty() {
        return T::one();
    }
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    a[a.len() / 2].max(T::min_positive_value())
}

/// Eigenvalues in `window` for a separated or Friedrichs condition.
pub fn eigenvalues<T: Real>(
    setup: &SpectralSetup<T>,
    bc: &BoundaryCondition<T>,
    window: (T, T),
    cfg: &SpectralConfig<T>,
) -> Result<Eigenlist<T>> {
    let (alpha, beta) = angles(setup, bc)?;
    if !(window.0 < window.1) || !window.0.is_finite() || !window.1.is_finite() {
        return Err(Error::Argument("eigenvalue window must be a finite interval".into()));
    }
    if cfg.panels < 2 {
        return Err(Error::Argument("need at least two scan panels".into()));
    }
    let truncs = if beta.is_none() { setup.truncation_points(cfg) } else { Vec::new() };
    let trunc0 = truncs.first().copied();
    let d = |l: T| characteristic(setup, alpha, beta, l, trunc0, cfg);

    let mut win = window;
    let mut widened = false;
    let (grid, vals) = loop {
        let n = cfg.panels;
        let h = (win.1 - win.0) / T::from_usize(n).unwrap();
        let grid: Vec<T> = (0..=n).map(|i| if i == n { win.1 } else { win.0 + h * T::from_usize(i).unwrap() }).collect();
        let vals = eval_all(&d, &grid, cfg.parallel)?;
        let med = median_abs(&vals);
        let ambiguous = vals[0].abs() <= cfg.endpoint_tol * med || vals[n].abs() <= cfg.endpoint_tol * med;
        if !ambiguous {
            break (grid, vals);
        }
        if widened {
            return Err(Error::RootSearch(format!(
                "window end sits on an eigenvalue even after widening to [{}, {}]",
                win.0, win.1
            )));
        }
        let pad = (win.1 - win.0) * T::lit(0.01);
        win = (win.0 - pad, win.1 + pad);
        widened = true;
    };
    let panel = (win.1 - win.0) / T::from_usize(cfg.panels).unwrap();

    let mut brackets = Vec::new();
    for i in 0..cfg.panels {
        let (f0, f1) = (vals[i], vals[i + 1]);
        if f0 == T::zero() {
            brackets.push((grid[i], grid[i], f0));
        } else if (f0 > T::zero()) != (f1 > T::zero()) && f1 != T::zero() {
            brackets.push((grid[i], grid[i + 1], f0));
        }
    }
    let refine = |&(lo, hi, flo): &(T, T, T)| -> Result<(T, usize)> {
        if lo == hi {
            return Ok((lo, 0));
        }
        bisect(&d, lo, hi, flo, cfg)
    };
    let mut roots: Vec<(T, usize)> = if cfg.parallel {
        brackets.par_iter().map(refine).collect::<Result<_>>()?
    } else {
        brackets.iter().map(refine).collect::<Result<_>>()?
    };

    // limit-point b: push the truncation out until the roots settle
    let mut used = trunc0;
    if beta.is_none() && !roots.is_empty() {
        let mut level = 0;
        loop {
            level += 1;
            let Some(&x) = truncs.get(level) else {
                return Err(Error::RootSearch("eigenvalues did not settle under truncation doubling".into()));
            };
            let dx = |l: T| characteristic(setup, alpha, beta, l, Some(x), cfg);
            let moved = |&(r, _): &(T, usize)| -> Result<(T, usize, T)> {
                let mut w = panel * T::lit(0.5);
                for _ in 0..6 {
                    let (lo, hi) = (r - w, r + w);
                    let (flo, fhi) = (dx(lo)?, dx(hi)?);
                    if (flo > T::zero()) != (fhi > T::zero()) {
                        let (nr, steps) = bisect(&dx, lo, hi, flo, cfg)?;
                        return Ok((nr, steps, (nr - r).abs()));
                    }
                    w = w * T::lit(0.5);
                }
                Err(Error::RootSearch(format!("lost the eigenvalue near {r} when truncating at {x}")))
            };
            let next: Vec<(T, usize, T)> = if cfg.parallel {
                roots.par_iter().map(moved).collect::<Result<_>>()?
            } else {
                roots.iter().map(moved).collect::<Result<_>>()?
            };
            let settled = next.iter().all(|&(r, _, dr)| dr <= cfg.truncation_tol * T::one().max(r.abs()));
            roots = next.into_iter().map(|(r, s, _)| (r, s)).collect();
            used = Some(x);
            if settled {
                break;
            }
        }
    }

    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    roots.dedup_by(|a, b| (a.0 - b.0).abs() <= cfg.root_abs_tol.max(cfg.root_rel_tol * a.0.abs()));
    roots.retain(|r| r.0 >= win.0 && r.0 <= win.1);
    let final_d = |l: T| characteristic(setup, alpha, beta, l, used, cfg);
    let eigen: Vec<T> = roots.iter().map(|r| r.0).collect();
    let h = panel * T::lit(0.5);
    let probes: Vec<T> = eigen.iter().flat_map(|&l| [l, l - h, l + h]).collect();
    let res = eval_all(&final_d, &probes, cfg.parallel)?;
    Ok(Eigenlist {
        characteristic_residuals: res.chunks(3).map(|c| c[0].abs() / c[1].abs().max(c[2].abs())).collect(),
        eigenvalues: eigen,
        bracket_info: BracketInfo {
            requested: window,
            window: win,
            panels: cfg.panels,
            widened,
            truncation: used,
            bisection_steps: roots.iter().map(|r| r.1).collect(),
        },
    })
}
