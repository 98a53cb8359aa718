//! Function theory on 2-D symplectic domains: exact Lie-series expansions of
//! composed Hamiltonian flows, numerical Poisson-bracket functionals and their
//! rigidity inequalities, the lower-semicontinuity counterexample, and
//! empirical convergence-rate profiling.

pub mod lie;
pub mod field;
pub mod witness;
pub mod rates;
