use std::path::PathBuf;

use rayon::prelude::*;
use slspec_core::bvals::{boundary_values, LimitConfig};
use slspec_core::classifier::{classify_endpoint, ClassifierConfig};
use slspec_core::extensions::{friedrichs, BoundaryCondition};
use slspec_core::integrator::IntegratorConfig;
use slspec_core::model::{EndpointClass, Side};
use slspec_core::spectral::{eigenvalues, m_function, mobius_alpha_shift, SpectralConfig, SpectralSetup};
use slspec_core::{cx, Catalog};
use thiserror::Error;

use crate::spec::{BcSpec, Command, RunSpec, SpecError, Tolerances};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] slspec_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Numerical(_) => 2,
            RunError::Spec(_) | RunError::Io { .. } => 1,
        }
    }
}

/// 17 significant digits; −0 prints as 0.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn integrator(base: IntegratorConfig<f64>, t: &Tolerances) -> IntegratorConfig<f64> {
    IntegratorConfig { rel_tol: t.rel_tol.unwrap_or(base.rel_tol), abs_tol: t.abs_tol.unwrap_or(base.abs_tol), ..base }
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Execute `spec` and return the CSV bytes.
pub fn execute(spec: &RunSpec) -> Result<Vec<u8>, RunError> {
    let cp = spec.problem.catalog().map_err(|e| SpecError::Semantic { key: "problem".into(), message: e.to_string() })?;
    let tol = &spec.tolerances;
    match &spec.command {
        Command::Classify { endpoint, z } => {
            let cfg = ClassifierConfig { integrator: integrator(ClassifierConfig::default().integrator, tol), ..ClassifierConfig::default() };
            let (x, y) = z.unwrap_or((0.0, 1.0));
            let r = classify_endpoint(&cp.problem, *endpoint, cx(x, y), &cfg)?;
            let row = vec![
                endpoint.to_string(),
                cp.problem.endpoint(*endpoint).to_string(),
                num(r.z_used.re),
                num(r.z_used.im),
                r.verdict.to_string(),
                r.note.clone(),
            ];
            Ok(table(&["endpoint", "x", "re_z", "im_z", "verdict", "note"], vec![row]))
        }
        Command::Bvals { endpoint } => {
            let basis = cp.basis(*endpoint)?;
            let cfg = LimitConfig::default();
            let mut rows = Vec::new();
            for (id, g) in cp.test_family(*endpoint)? {
                let v = boundary_values(&g, &basis, &cfg)?;
                rows.push(vec![id, num(v.g_tilde.re), num(v.g_tilde.im), num(v.g_tilde_prime.re), num(v.g_tilde_prime.im)]);
            }
            Ok(table(&["g_id", "g_tilde_re", "g_tilde_im", "g_tilde_prime_re", "g_tilde_prime_im"], rows))
        }
        Command::Spectrum { bc, window, panels } => {
            let base = SpectralConfig::default();
            let cfg = SpectralConfig { integrator: integrator(base.integrator, tol), panels: panels.unwrap_or(base.panels), ..base };
            let setup = SpectralSetup::from_catalog(&cp)?;
            let (condition, friedrichs_like) = match bc {
                BcSpec::Friedrichs => (friedrichs(cp.classes), true),
                BcSpec::Separated { alpha, beta } => (
                    BoundaryCondition::separated(*alpha, *beta, cp.classes)?,
                    alpha.is_none_or(|a| a == 0.0) && beta.is_none_or(|b| b == 0.0),
                ),
            };
            let e = eigenvalues(&setup, &condition, *window, &cfg)?;
            let rows = e
                .eigenvalues
                .iter()
                .zip(&e.characteristic_residuals)
                .enumerate()
                .map(|(i, (&l, &res))| {
                    let exact = if friedrichs_like { nearest_exact(&cp, l) } else { None };
                    let (ex, err) = exact.map_or((String::new(), String::new()), |x| (num(x), num((l - x).abs())));
                    vec![i.to_string(), num(l), num(res), ex, err]
                })
                .collect();
            Ok(table(&["index", "lambda", "residual", "exact_if_known", "abs_err"], rows))
        }
        Command::Mscan { alpha, beta, points } => {
            let base = SpectralConfig::default();
            let cfg = SpectralConfig { integrator: integrator(base.integrator, tol), ..base };
            let setup = SpectralSetup::from_catalog(&cp)?;
            let lc_right = cp.class(Side::Right) == EndpointClass::LimitCircle;
            let beta0 = if lc_right { Some(beta.unwrap_or(0.0)) } else { None };
            let pts = points.points();
            let values = pts
                .par_iter()
                .map(|&(x, y)| {
                    let z = cx(x, y);
                    let m = m_function(&setup, *alpha, beta0, z, &cfg)?.m;
                    // closed forms are normalized at α = 0 (and β = 0 at a limit-circle b)
                    let exact = if beta0.is_none_or(|b| b == 0.0) {
                        cp.m_exact(z).and_then(|e| mobius_alpha_shift(e, 0.0, *alpha)).ok()
                    } else {
                        None
                    };
                    Ok((m, exact))
                })
                .collect::<Result<Vec<_>, slspec_core::Error>>()?;
            let rows = pts
                .iter()
                .zip(values)
                .map(|(&(x, y), (m, exact))| {
                    let (er, ei) = exact.map_or((String::new(), String::new()), |e| (num(e.re), num(e.im)));
                    vec![num(x), num(y), num(m.re), num(m.im), er, ei]
                })
                .collect();
            Ok(table(&["re_z", "im_z", "re_m", "im_m", "re_m_exact", "im_m_exact"], rows))
        }
    }
}

/// Closest Friedrichs eigenvalue from the closed form, if the problem has one.
fn nearest_exact(cp: &Catalog, lambda: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for n in 0.. {
        let Some(x) = cp.spectrum(n) else { break };
        if best.is_none_or(|b| (x - lambda).abs() < (b - lambda).abs()) {
            best = Some(x);
        }
        if x > lambda {
            break;
        }
    }
    best
}

/// Execute `spec` and write the CSV to its output path, or stdout.
pub fn run(spec: &RunSpec) -> Result<(), RunError> {
    use std::io::Write;
    let bytes = execute(spec)?;
    match &spec.output {
        Some(path) => std::fs::write(path, &bytes).map_err(|source| RunError::Io { path: path.into(), source }),
        None => std::io::stdout().write_all(&bytes).map_err(|source| RunError::Io { path: "<stdout>".into(), source }),
    }
}
