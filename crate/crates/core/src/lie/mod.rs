//! Exact free-Lie-algebra arithmetic over the rationals and the flow
//! composition calculus.

pub mod expansion;
pub mod flow;
pub mod lyndon;
pub mod poly;
pub mod series;

use thiserror::Error;

pub use expansion::{verify_expansion_32, verify_expansion_33, Expansion, ExpansionReport};
pub use flow::{path_generator, FlowWord, TimePoly};
pub use lyndon::{lyndon_basis, witt_number, Letter, LyndonWord};
pub use poly::{bracket, rat, LiePoly, Rational};
pub use series::LieSeries;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("{what} = {value} out of range [{lo}, {hi}]")]
    Bounds {
        what: &'static str,
        value: i64,
        lo: i64,
        hi: i64,
    },
    #[error("not a Lyndon word: {0:?}")]
    NotLyndon(String),
    #[error("invalid flow word: {0}")]
    InvalidWord(String),
    #[error("coefficient {0} does not fit in 64 bits")]
    Overflow(String),
}
