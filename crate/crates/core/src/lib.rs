//! Numerical laboratory for the largest eigenvalue of sparse Erdős–Rényi
//! graphs carrying Weibull-tailed edge weights.
//!
//! The crate is split along the objects it computes:
//!
//! - [`distributions`]: exact Weibull sampling and analytic tail bounds for sums.
//! - [`randgraph`]: sparse graph sampling, weights, structural analyzers.
//! - [`spectral`]: largest eigenvalue (dense oracle, Lanczos) and deterministic
//!   spectral inequalities for weighted graphs.
//! - [`variational`]: the generalized Motzkin–Straus problem, rate functions and
//!   typical values.
//! - [`planting`]: deterministic structures that certify a large eigenvalue.
//! - [`experiments`]: seeded Monte Carlo campaigns and their reports.
//! - [`cli`]: the `specldp` command-line front end.

pub mod cli;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod planting;
pub mod randgraph;
pub mod rng;
pub mod scale;
pub mod spectral;
pub mod variational;

pub use error::{Error, Result};
pub use scale::Scale;
