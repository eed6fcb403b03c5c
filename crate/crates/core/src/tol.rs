//! Numeric tolerances shared across the crate.
//!
//! Double precision accumulates error well below 1e-12 at the dimensions
//! this crate works with (side <= 2^10), so the internal checks sit at
//! 1e-10 and the nullspace pivot threshold at 1e-9.

/// Unitarity / hermiticity acceptance for internally constructed operators.
pub const UNITARITY: f64 = 1e-10;

/// Looser unitarity acceptance for user-supplied (hand-typed) matrices.
pub const USER_UNITARITY: f64 = 1e-8;

/// Pivot threshold for nullspace elimination.
pub const NULLSPACE_PIVOT: f64 = 1e-9;

/// Acceptance window on |a|^2 + |b|^2 for qbit construction; inputs inside
/// the window are renormalized, outside rejected.
pub const NORM_WINDOW: f64 = 1e-6;

/// Norm drift beyond which a gate application is rejected instead of
/// renormalized. Sits above [`USER_UNITARITY`] so accepted user gates
/// always stay applicable.
pub const APPLY_DRIFT: f64 = 1e-6;

/// Trace-one acceptance for density matrices.
pub const DENSITY_TRACE: f64 = 1e-10;

/// Hermiticity acceptance for density matrices.
pub const DENSITY_HERMITIAN: f64 = 1e-10;

/// Eigenvalue floor for density matrices (how far below zero an
/// eigenvalue may dip before the matrix is rejected).
pub const DENSITY_EIGEN_FLOOR: f64 = 1e-9;

/// Residual target for channel fixed-point iteration.
pub const CHANNEL_RESIDUAL: f64 = 1e-10;

/// Iteration budget for channel fixed-point iteration.
pub const CHANNEL_MAX_ITER: usize = 100_000;

/// Angle tolerance for the perfect-correlation check |delta - pi|.
pub const ANGLE: f64 = 1e-9;
