//! Heisenberg-picture evaluation of matrix product states.
//!
//! A matrix product state on a spin chain is generated by site tensors
//! `{A_i}` (one `D x D` matrix per local basis state). Every site family
//! doubles as the Kraus family of a transfer channel `M -> sum_i A_i^† M A_i`,
//! and expectation values of local observables reduce to traces of composed
//! superoperators. This crate provides:
//!
//! - [`linalg`]: dense complex primitives (Kronecker products, partial traces,
//!   total-variation norm, Hermitian and general eigensolvers).
//! - [`channel`]: Kraus families, superoperators in a column-stacked
//!   representation, CPTP checks, fixed points, spectral classification and
//!   Markov-Dobrushin contraction certificates.
//! - [`mps`]: chains, observable lifts, finite-volume states `phi_n` evaluated
//!   both by brute-force state vectors and by transfer channels, projective
//!   and ergodic thermodynamic limits.
//! - [`models`]: GHZ, depolarizing and random gauge-fixed chains with closed
//!   forms used as regression oracles.
//! - [`cli`]: report-producing commands behind the `mpsh` binary.
//!
//! ```
//! use mpsh::models::{depolarizing_model, DepolarizingParams};
//! use mpsh::mps::{ergodic_limit, LocalObservable};
//! use mpsh::linalg::matrix_unit;
//!
//! let bundle = depolarizing_model(DepolarizingParams::new(0.3).unwrap());
//! let x = LocalObservable::at_site(1, matrix_unit(4, 0, 0));
//! let phi = ergodic_limit(&bundle.chain, &x, &Default::default()).unwrap();
//! assert!((phi.re - 0.7).abs() < 1e-10);
//! ```

pub mod channel;
pub mod cli;
mod error;
pub mod linalg;
pub mod models;
pub mod mps;
pub mod serde_matrix;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
