//! Desk-scale quantum information simulator.
//!
//! The crate models a one-qbit signalling loop: an agent receives a bit,
//! applies a policy to it, and feeds the result back as its own earlier
//! input. Classically the self-negating policy has no consistent
//! assignment; quantum mechanically the equal-weight superposition is a
//! fixed point of the policy and resolves the loop. On top of that core
//! the crate provides singlet-pair correlation sampling, a small scenario
//! description language, and a superposition-based merge for conflicting
//! database bits.
//!
//! Modules:
//! - [`linalg`]: dense complex vectors/matrices, Kronecker products,
//!   partial trace, nullspaces, closed-form 2x2 eigensystems.
//! - [`rng`]: seedable, stream-splittable PCG32 generator.
//! - [`state`]: classical bits, qbits, density matrices, Born sampling.
//! - [`gates`]: the gate catalog (NOT/identity/Pauli/Hadamard) and
//!   gate application.
//! - [`fixedpoint`]: classical fixed-point enumeration, eigenvalue-1
//!   eigenspaces, channel fixed points, paradox classification.
//! - [`epr`]: singlet correlations and the two-telegraph loop simulator.
//! - [`scenario`]: the `.scn` scenario language (parse/validate/serialize).
//! - [`dbmerge`]: conflicting-bit merge, coherent pipelines, resolution.
//! - [`sampling`]: deterministic batched shot sampling.

pub mod dbmerge;
pub mod encode;
pub mod epr;
pub mod fixedpoint;
pub mod gates;
pub mod linalg;
pub mod rng;
pub mod sampling;
pub mod scenario;
pub mod state;
pub mod tol;

pub use linalg::{ComplexMatrix, ComplexVector};
pub use rng::RngStream;
pub use state::{Cbit, DensityMatrix, Qbit};
