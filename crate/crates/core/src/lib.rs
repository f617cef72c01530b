//! Exact harmonic-form spaces on invariant almost-Hermitian models.
//!
//! Forms carry finite Fourier-polynomial coefficients over Gaussian rationals. Every
//! first-order operator drops one factor of π, so all linear algebra stays exact.

pub mod algebra;
pub mod calculus;
pub mod error;
pub mod linalg;
pub mod model;
pub mod sampling;
pub mod solver;

pub use error::{Error, Result};
pub use num_rational::BigRational;
