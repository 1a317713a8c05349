use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("point {x} outside the open interval ({a}, {b})")]
    Domain { x: f64, a: f64, b: f64 },

    #[error("coefficient {name} is not admissible at x = {x} (value {value})")]
    Coefficient { name: &'static str, x: f64, value: f64 },

    #[error("integration failed at x = {x} ({reason}); last state u = {u_re}{u_im:+}i, u1 = {u1_re}{u1_im:+}i")]
    Integration {
        reason: String,
        x: f64,
        u_re: f64,
        u_im: f64,
        u1_re: f64,
        u1_im: f64,
    },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("limit does not exist: {0}")]
    Divergence(String),

    #[error("series did not converge within {terms} terms: {what}")]
    Series { what: &'static str, terms: usize },

    #[error("argument {0} is within pole tolerance of a singularity")]
    Pole(String),

    #[error("endpoint is oscillatory at lambda = {0}; choose a smaller reference value")]
    Oscillatory(f64),

    #[error("classification inconclusive: {0}")]
    Inconclusive(String),

    #[error("boundary condition rejected: {0}")]
    BoundaryCondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("root search failed: {0}")]
    RootSearch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
