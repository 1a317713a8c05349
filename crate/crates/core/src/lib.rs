//! Singular Sturm–Liouville operators bounded from below.
//!
//! τu = r⁻¹[−(p u′)′ + q u] on (a, b). The crate classifies endpoints
//! (limit circle / limit point), builds principal and nonprincipal solutions,
//! extracts generalized boundary values g̃ = −W(u, g), g̃′ = W(û, g), validates
//! self-adjoint boundary conditions, and computes eigenvalues and
//! Weyl–Titchmarsh m-functions. Everything is generic over [`Real`]; `f64`
//! aliases live at the crate root.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod bvals;
pub mod classifier;
pub mod error;
pub mod extensions;
pub mod integrator;
pub mod model;
pub mod oracles;
pub mod principal;
pub mod quadrature;
pub mod scalar;
pub mod solution;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::{cx, re, Cx, Real};

/// `f64` instantiations of the generic types.
pub type Problem = model::SlProblem<f64>;
pub type State = model::SolutionState<f64>;
pub type Handle = solution::SolutionHandle<f64>;
pub type Basis = principal::ReferenceBasis<f64>;
pub type Catalog = oracles::CatalogProblem<f64>;
pub type Condition = extensions::BoundaryCondition<f64>;
pub type Setup = spectral::SpectralSetup<f64>;
pub type Complex64 = Cx<f64>;
