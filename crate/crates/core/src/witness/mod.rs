//! The counterexample to lower semicontinuity of `max {{F,G},F}`: profiles
//! `u, w, a`, the fields `F = u(p)`, `G = −v(q)`, `F_N = F + a sin(NF)/N`,
//! and numerical certificates for each step of the argument.

pub mod build;
pub mod check;
pub mod rpoly;
pub mod spline;

use thiserror::Error;

use crate::field::FieldError;

pub use build::{build_witness, Profiles, WitnessConfig, WitnessFields};
pub use check::{
    check_invariants, cutoff_witness, fine_q_nodes, r_envelope, r_envelope_at, verify_theorem41, CutoffWitnessReport,
    EnvelopeReport,
    InvariantCheck, InvariantReport, Theorem41Report, Theorem41Row,
};
pub use rpoly::{kappa_search, quadratic_max_abs, r_eval, r_extrema, RExtrema, RPolynomial};
pub use spline::Spline;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("invalid witness config: {0}")]
    InvalidConfig(String),
    #[error("bound {bound} is not achievable: max |r| at alpha0 is {at_alpha0}")]
    Unachievable { bound: f64, at_alpha0: f64 },
    #[error("infeasible construction: {0}")]
    Infeasible(String),
    #[error("{what} = {value} exceeds {limit} at q = {q}")]
    BoundViolated { what: &'static str, q: f64, value: f64, limit: f64 },
    #[error("residual {residual} at N = {n} exceeds its O(1/N) bound {bound}")]
    ResidualNotDecaying { n: u64, residual: f64, bound: f64 },
    #[error("cutoff precondition: {0}")]
    PlateauTooSmall(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}
