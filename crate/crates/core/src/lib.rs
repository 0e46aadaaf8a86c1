//! Dynamic Tobit autoregressions with roots at or near unity.
//!
//! The crate covers the model `y_t = [α + β y_{t-1} + φᵀΔy_{t-1} + u_t]₊` written in
//! augmented Dickey–Fuller form: simulation of sample paths and of the reflected
//! limit process, Gaussian maximum likelihood (in the concave Olsen coordinates),
//! Powell's censored least absolute deviations, OLS, sequential lag selection,
//! and a seeded Monte Carlo harness.

#![forbid(unsafe_code)]

pub mod clad;
pub mod cli;
pub mod design;
pub mod error;
pub mod inference;
pub mod ingest;
pub mod jsr;
pub mod mle;
pub mod model;
pub mod normal;
pub mod ols;
pub mod output;
pub mod rng;
pub mod simplex;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
pub use model::{Innovation, LurSpec, ModelSpec, Series};
