//! Exact effective logical noise channels of stabilizer codes.
//!
//! Given an `[[n, k, d]]` stabilizer code and a local Markovian noise model
//! (a tensor product of single-qubit channels, or a probabilistic mixture of
//! such products), this crate computes the exact logical process matrix
//! conditioned on each syndrome outcome, together with syndrome probabilities,
//! recovery application, syndrome averaging, and coherence diagnostics.
//!
//! Two independent computation paths are provided:
//!
//! - [`logical`]: the fast path, a factorized sum over stabilizer pairs that
//!   works entirely with single-qubit process matrices.
//! - [`oracle`]: a brute-force dense Hilbert-space simulation (up to eight
//!   qubits) used to verify the fast path.
//!
//! The [`channels`] module carries single-qubit channel representations
//! (process matrix, Choi, Kraus), standard noise constructors, and the
//! infidelity-based bound checks used to analyse how syndrome measurement
//! suppresses coherent errors. [`pauli`] and [`codes`] provide the exact
//! symplectic Pauli arithmetic and code machinery underneath.
//!
//! With the default `parallel` feature, per-syndrome and per-entry work is
//! dispatched through rayon; disabling the feature yields a dependency-free
//! sequential build with identical results.

pub mod channels;
pub mod codes;
pub mod logical;
pub mod oracle;
pub mod parallel;
pub mod pauli;
pub mod report;

mod error;

pub use error::{Error, Result};
pub use pauli::{Pauli, PauliOperator};
