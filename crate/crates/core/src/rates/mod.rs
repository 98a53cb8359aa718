//! Empirical convergence rates of the perturbed infimum
//! `Φ̄_ε(F,G) = inf { Φ(F′,G′) : ‖F′ − F‖ ≤ ε, ‖G′ − G‖ ≤ ε }`.
//!
//! Every value produced here is `Φ` of an explicit feasible pair, so it bounds
//! `Φ̄_ε` from above and the reported decreases bound the true ones from
//! below.

pub mod family;
pub mod fit;
pub mod phi;
pub mod report;
pub mod search;

use thiserror::Error;

use crate::field::FieldError;

pub use family::{FamilyKind, ParamBox};
pub use fit::{exponent_fit, ExponentFit};
pub use phi::{PhiEvaluator, PhiSpec};
pub use report::{log_grid, rate_report, RateChecks, RateRow, RateScanReport, ScanOptions, REFERENCE_EXPONENTS};
pub use search::{phi_bar_upper, PhiBarResult, RateProblem, SearchOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RateError {
    #[error("invalid epsilon {0}")]
    InvalidEpsilon(f64),
    #[error("invalid scan options: {0}")]
    InvalidOptions(String),
    #[error("exponent fit needs at least 3 points with positive decrease, {kept} left")]
    TooFewPoints { kept: usize },
    #[error("optimizer failed: {0}")]
    Optimizer(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}
