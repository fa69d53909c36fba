//! Numerical toolkit for one-shot entanglement manipulation.
//!
//! The crate computes the hypothesis testing relative entropy `D_H^ε`, the
//! ε-Rains relative entropy over the PPT′ set, and uses both to check the
//! non-asymptotic bound relating distillation and dilution on concrete
//! quasi-cyclic processes:
//!
//! ```text
//! log2 d_out <= log2 d_in + log2(1 / (1 - ε'))
//! ```
//!
//! where `ε' = (√ε₁ + √ε₂)²` when errors are measured by fidelity and
//! `ε' = ε₁ + ε₂` when they are measured by normalized trace distance.
//!
//! Everything is dense and small: bipartite dimensions up to a few dozen.
//! Linear algebra, the semidefinite programming solver and the Neyman–Pearson
//! hypothesis test are implemented in-crate.
//!
//! # Example
//!
//! ```
//! use ebit::{rains, states};
//!
//! let phi = states::max_entangled(2).unwrap();
//! let r = rains::rains_isotropic_reduced(&phi, 0.5).unwrap();
//! assert!((r.value_bits - 2.0).abs() < 1e-12);
//! ```

pub mod acceptance;
pub mod channels;
pub mod cli;
pub mod error;
pub mod hyptest;
pub mod linalg;
pub mod metrics;
pub mod rains;
pub mod rng;
pub mod sdp;
pub mod secondlaw;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{BipartiteState, ComplexMatrix, EigenDecomposition, HermitianOperator};
