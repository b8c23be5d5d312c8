//! Derivative-free composite optimization built around structured
//! finite-difference gradient surrogates with variance reduction, plus the
//! baselines it is usually compared against and a reproducible benchmark
//! harness.
//!
//! The pieces, bottom up:
//!
//! * [`linalg`] — small dense kernels (thin QR, one-sided Jacobi SVD).
//! * [`directions`] — orthonormal direction frames sampled uniformly at
//!   random, canonical frames, and seed plumbing.
//! * [`prox`] — proximal operators for the nonsmooth term.
//! * [`problems`] — finite-sum objectives and the evaluation ledger that
//!   meters every component function call.
//! * [`estimators`] — finite-difference gradient surrogates.
//! * [`optimizers`] — the variance-reduced structured solver and baselines.
//! * [`diagnostics`] — gradient-mapping stationarity measures.
//! * [`dataio`] — LIBSVM-format parsing and feature standardization.
//! * [`bench`] — declarative experiment specs, grid search, CSV reports.

pub mod bench;
pub mod dataio;
pub mod diagnostics;
pub mod directions;
mod error;
pub mod estimators;
pub mod linalg;
pub mod optimizers;
pub mod problems;
pub mod prox;
pub mod verify;

pub use error::{Error, Result};
