//! Numerical calculus of Poisson brackets on 2-D domains.

pub mod advect;
pub mod bracket;
pub mod domain;
pub mod io;
pub mod jet;
pub mod jetfield;
pub mod ops;
pub mod smooth;
pub mod trig;

use thiserror::Error;

pub use advect::{advect, flow_point, y_bound_check, YBoundReport};
pub use bracket::{iterated_bracket, poisson, BracketWord, Sym};
pub use domain::{Domain2, DomainKind, Grid, GridValues};
pub use jet::Jet;
pub use jetfield::{JetField, Provenance};
pub use ops::*;
pub use smooth::{plateau_field, smoothstep, Plateau};
pub use trig::{TrigPoly, TrigTerm};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("fields live on different domains")]
    DomainMismatch,
    #[error("jet order {needed} required, only {available} available")]
    JetOrder { needed: usize, available: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid functional vector: {0}")]
    InvalidVector(String),
    #[error("{what} does not vanish on the boundary band: {value} at ({p}, {q})")]
    Margin { what: String, p: f64, q: f64, value: f64 },
    #[error("advection failed: {0}")]
    Advect(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}
