//! Fixed-point analysis of loop policies.
//!
//! Three layers answer "what state survives being fed back to itself":
//!
//! 1. Classical: exhaustive enumeration of bit assignments fixed by a
//!    basis-state map. The bit-flip policy has none; that emptiness is
//!    the paradox.
//! 2. Pure quantum: the eigenvalue-1 eigenspace of the policy unitary,
//!    computed as the nullspace of (U - I). For the flip gate this is the
//!    single direction (|0> + |1>)/sqrt(2).
//! 3. Channel: a density-matrix fixed point of the loop channel
//!    T(rho) = tr_env(U (env (x) rho) U^dagger). This generalizes the
//!    pure condition (recovered when T is conjugation by a unitary with a
//!    +1 eigenvector) and always exists for unitary loops, so the report
//!    never comes back empty-handed.

use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

use crate::encode;
use crate::gates::Gate;
use crate::linalg::{self, ComplexMatrix, ComplexVector, C_ONE};
use crate::state::{DensityMatrix, StateError};
use crate::tol;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("map on {bits} bits exceeds the {max}-bit enumeration limit")]
    TooManyBits { bits: u32, max: u32 },
    #[error("table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("table entry {value} is outside the {bits}-bit domain")]
    TableRange { value: usize, bits: u32 },
    #[error(
        "loop unitary is {rows}x{cols}, expected square of side {expected} (env {env} x loop {loop_dim})"
    )]
    LoopDimensions {
        rows: usize,
        cols: usize,
        expected: usize,
        env: usize,
        loop_dim: usize,
    },
    #[error("environment state has side {got}, expected {expected}")]
    EnvironmentDimension { got: usize, expected: usize },
    #[error("no fixed point within {max_iter} iterations (residual {residual:.3e})")]
    NonConvergence { residual: f64, max_iter: usize },
    #[error("iteration produced an invalid density matrix: {0}")]
    InvalidResult(#[from] StateError),
}

/// A total map on n-bit strings, n <= 10.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalMap {
    bits: u32,
    table: Vec<usize>,
}

pub const MAX_CLASSICAL_BITS: u32 = 10;

impl ClassicalMap {
    pub fn new(bits: u32, table: Vec<usize>) -> Result<Self, SolverError> {
        if bits == 0 || bits > MAX_CLASSICAL_BITS {
            return Err(SolverError::TooManyBits {
                bits,
                max: MAX_CLASSICAL_BITS,
            });
        }
        let domain = 1usize << bits;
        if table.len() != domain {
            return Err(SolverError::TableSize {
                got: table.len(),
                expected: domain,
            });
        }
        if let Some(&value) = table.iter().find(|&&v| v >= domain) {
            return Err(SolverError::TableRange { value, bits });
        }
        Ok(Self { bits, table })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// Read a basis-state map off a gate whose columns each carry exactly
    /// one unit-modulus entry (a permutation up to phases). Returns None
    /// for genuinely superposing gates.
    pub fn from_gate(g: &Gate) -> Option<Self> {
        let m = g.matrix();
        let side = m.rows();
        let bits = side.trailing_zeros();
        if side != 1 << bits || bits == 0 || bits > MAX_CLASSICAL_BITS {
            return None;
        }
        let mut table = vec![0usize; side];
        for col in 0..side {
            let mut target = None;
            for row in 0..side {
                let modulus = m.get(row, col).norm();
                if (modulus - 1.0).abs() <= 1e-6 {
                    if target.is_some() {
                        return None;
                    }
                    target = Some(row);
                } else if modulus > 1e-6 {
                    return None;
                }
            }
            table[col] = target?;
        }
        Some(Self { bits, table })
    }
}

/// Render an n-bit value MSB-first.
fn bitstring(value: usize, bits: u32) -> String {
    format!("{value:0width$b}", width = bits as usize)
}

/// All x with m(x) = x, as bitstrings in ascending order.
pub fn classical_fixed_points(m: &ClassicalMap) -> Vec<String> {
    (0..m.table.len())
        .filter(|&x| m.table[x] == x)
        .map(|x| bitstring(x, m.bits))
        .collect()
}

/// Orthonormal basis of the eigenvalue-1 eigenspace of a gate, i.e. the
/// states the gate feeds back unchanged.
pub fn pure_fixed_points(g: &Gate, tolerance: f64) -> Vec<ComplexVector> {
    let shifted = g
        .matrix()
        .sub(&ComplexMatrix::identity(g.dim()))
        .expect("gate matrices are square");
    linalg::nullspace(&shifted, tolerance)
}

/// Result of the channel fixed-point iteration.
#[derive(Debug, Clone)]
pub struct ChannelFixedPoint {
    pub rho: DensityMatrix,
    pub residual: f64,
    pub iterations: usize,
}

/// One application of T(rho) = tr_env(U (env (x) rho) U^dagger).
fn apply_loop_channel(
    u: &ComplexMatrix,
    dims: (usize, usize),
    env: &ComplexMatrix,
    rho: &ComplexMatrix,
) -> ComplexMatrix {
    let joint = linalg::tensor_product(env, rho);
    let evolved = u
        .mul(&joint)
        .and_then(|m| m.mul(&u.adjoint()))
        .expect("dimensions checked by caller");
    linalg::partial_trace(&evolved, dims, 1).expect("dimensions checked by caller")
}

/// Find a density matrix with T(rho) = rho for the loop channel, by
/// running-average iteration rho <- (rho + T(rho)) / 2 from the maximally
/// mixed state. The averaging damps the unit-modulus oscillations a plain
/// power iteration would keep forever, while leaving the fixed set
/// unchanged. The returned residual is the max-norm of T(rho) - rho.
pub fn channel_fixed_point(
    loop_unitary: &ComplexMatrix,
    dims: (usize, usize),
    environment_state: &DensityMatrix,
    tolerance: f64,
    max_iter: usize,
) -> Result<ChannelFixedPoint, SolverError> {
    let (env_dim, loop_dim) = dims;
    let side = env_dim * loop_dim;
    if !loop_unitary.is_square() || loop_unitary.rows() != side || side == 0 {
        return Err(SolverError::LoopDimensions {
            rows: loop_unitary.rows(),
            cols: loop_unitary.cols(),
            expected: side,
            env: env_dim,
            loop_dim,
        });
    }
    if environment_state.side() != env_dim {
        return Err(SolverError::EnvironmentDimension {
            got: environment_state.side(),
            expected: env_dim,
        });
    }

    let env = environment_state.matrix();
    let mut rho =
        ComplexMatrix::identity(loop_dim).scale(Complex64::new(1.0 / loop_dim as f64, 0.0));
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iter {
        let image = apply_loop_channel(loop_unitary, dims, env, &rho);
        residual = image.max_abs_diff(&rho);
        if residual <= tolerance {
            let cleaned = rho.hermitized();
            let cleaned = cleaned.scale(C_ONE / cleaned.trace());
            return Ok(ChannelFixedPoint {
                rho: DensityMatrix::new(cleaned)?,
                residual,
                iterations: iteration,
            });
        }
        rho = rho
            .add(&image)
            .expect("same shape")
            .scale(Complex64::new(0.5, 0.0));
    }
    Err(SolverError::NonConvergence { residual, max_iter })
}

/// How a policy's consistency question resolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// At least one classical bit assignment is consistent.
    ConsistentClassically,
    /// No classical assignment survives, but a quantum state does.
    ParadoxicalClassicallyResolvedQuantumly,
    /// Nothing is fixed; cannot happen for unitary policies.
    Unresolvable,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::ConsistentClassically => "consistent-classically",
            Classification::ParadoxicalClassicallyResolvedQuantumly => {
                "paradoxical-classically-resolved-quantumly"
            }
            Classification::Unresolvable => "unresolvable",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full fixed-point analysis of one gate.
#[derive(Debug, Clone)]
pub struct FixedPointReport {
    /// None when the gate is not a basis-state map.
    pub classical_fixed_points: Option<Vec<String>>,
    pub quantum_eigenspace: Vec<ComplexVector>,
    pub channel_fixed_point: Option<DensityMatrix>,
    pub classification: Classification,
    pub residual: f64,
}

impl FixedPointReport {
    pub fn to_json(&self) -> Value {
        json!({
            "classical_fixed_points": self.classical_fixed_points,
            "quantum_eigenspace": Value::Array(
                self.quantum_eigenspace.iter().map(encode::vector_pairs).collect()
            ),
            "channel_fixed_point": self
                .channel_fixed_point
                .as_ref()
                .map(encode::density_rows)
                .unwrap_or(Value::Null),
            "classification": self.classification.as_str(),
            "residual": self.residual,
        })
    }
}

/// Analyze a policy gate: classical assignments, pure eigenspace, and a
/// canonical channel fixed point. When the eigenspace is non-trivial the
/// canonical fixed density matrix is the maximum-entropy choice, the
/// uniform mixture over the eigenbasis; otherwise the channel solver runs
/// on conjugation by the gate.
pub fn analyze(g: &Gate) -> FixedPointReport {
    let classical = ClassicalMap::from_gate(g)
        .as_ref()
        .map(classical_fixed_points);
    let eigenspace = pure_fixed_points(g, tol::NULLSPACE_PIVOT);

    let (channel, residual) = if eigenspace.is_empty() {
        let trivial_env = DensityMatrix::maximally_mixed(1);
        match channel_fixed_point(
            g.matrix(),
            (1, g.dim()),
            &trivial_env,
            tol::CHANNEL_RESIDUAL,
            tol::CHANNEL_MAX_ITER,
        ) {
            Ok(found) => (Some(found.rho), found.residual),
            Err(SolverError::NonConvergence { residual, .. }) => (None, residual),
            Err(_) => (None, f64::INFINITY),
        }
    } else {
        let weight = Complex64::new(1.0 / eigenspace.len() as f64, 0.0);
        let mut mix = ComplexMatrix::zeros(g.dim(), g.dim());
        for v in &eigenspace {
            mix = mix.add(&v.outer(v).scale(weight)).expect("same shape");
        }
        let mix = mix.hermitized();
        let image = g
            .matrix()
            .mul(&mix)
            .and_then(|m| m.mul(&g.matrix().adjoint()))
            .expect("square");
        let residual = image.max_abs_diff(&mix);
        let rho = DensityMatrix::new(mix).expect("uniform mixture over an orthonormal basis");
        (Some(rho), residual)
    };

    let classification = if classical.as_ref().is_some_and(|fps| !fps.is_empty()) {
        Classification::ConsistentClassically
    } else if !eigenspace.is_empty() || channel.is_some() {
        Classification::ParadoxicalClassicallyResolvedQuantumly
    } else {
        Classification::Unresolvable
    };

    FixedPointReport {
        classical_fixed_points: classical,
        quantum_eigenspace: eigenspace,
        channel_fixed_point: channel,
        classification,
        residual,
    }
}
