//! Gate catalog and gate application.
//!
//! The catalog carries the two operators scenarios are built on, the
//! bit-flip gate "D" and the identity relay "ID", plus the standard
//! one-qbit extensions "X", "Y", "Z", "H" so scenario files can declare
//! other policies. "X" shares D's matrix under its conventional name.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{ComplexMatrix, C_ZERO};
use crate::state::Qbit;
use crate::tol;

#[derive(Debug, Error, PartialEq)]
pub enum GateError {
    #[error("matrix is {rows}x{cols}; gates must be square with power-of-two side")]
    BadDimensions { rows: usize, cols: usize },
    #[error("matrix is not unitary within {tolerance:.1e} (deviation {deviation:.3e})")]
    NotUnitary { tolerance: f64, deviation: f64 },
    #[error("gate acts on dimension {gate_dim}, state has dimension {state_dim}")]
    DimensionMismatch { gate_dim: usize, state_dim: usize },
    #[error("gate application drifted the norm by {drift:.3e}")]
    NormDrift { drift: f64 },
    #[error("unknown gate name {name:?}")]
    UnknownName { name: String },
}

/// A named unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    name: String,
    matrix: ComplexMatrix,
}

impl Gate {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

fn catalog_gate(name: &str, rows: &[&[f64]]) -> Gate {
    Gate {
        name: name.to_string(),
        matrix: ComplexMatrix::from_real_rows(rows).expect("catalog matrices are well-formed"),
    }
}

/// The bit-flip operator [[0,1],[1,0]], named "D".
pub fn diagonalization_operator() -> Gate {
    catalog_gate("D", &[&[0.0, 1.0], &[1.0, 0.0]])
}

/// The 2x2 identity, named "ID".
pub fn identity_gate() -> Gate {
    catalog_gate("ID", &[&[1.0, 0.0], &[0.0, 1.0]])
}

pub fn pauli_x() -> Gate {
    catalog_gate("X", &[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> Gate {
    Gate {
        name: "Y".to_string(),
        matrix: ComplexMatrix::new(
            2,
            2,
            vec![
                C_ZERO,
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                C_ZERO,
            ],
        )
        .unwrap(),
    }
}

pub fn pauli_z() -> Gate {
    catalog_gate("Z", &[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn hadamard() -> Gate {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    catalog_gate("H", &[&[s, s], &[s, -s]])
}

/// Names the scenario language and the CLI accept.
pub const CATALOG_NAMES: [&str; 6] = ["D", "ID", "X", "Y", "Z", "H"];

/// Look a gate up by catalog name.
pub fn by_name(name: &str) -> Result<Gate, GateError> {
    match name {
        "D" => Ok(diagonalization_operator()),
        "ID" => Ok(identity_gate()),
        "X" => Ok(pauli_x()),
        "Y" => Ok(pauli_y()),
        "Z" => Ok(pauli_z()),
        "H" => Ok(hadamard()),
        _ => Err(GateError::UnknownName {
            name: name.to_string(),
        }),
    }
}

/// Wrap a user-supplied matrix as a gate. Acceptance is looser than the
/// internal unitarity check so hand-typed decimals pass.
pub fn gate_from_matrix(name: &str, m: ComplexMatrix) -> Result<Gate, GateError> {
    if !m.is_square() || !m.rows().is_power_of_two() || m.rows() < 2 {
        return Err(GateError::BadDimensions {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let gram = m.adjoint().mul(&m).expect("square");
    let deviation = gram.max_abs_diff(&ComplexMatrix::identity(m.rows()));
    if deviation > tol::USER_UNITARITY {
        return Err(GateError::NotUnitary {
            tolerance: tol::USER_UNITARITY,
            deviation,
        });
    }
    Ok(Gate {
        name: name.to_string(),
        matrix: m,
    })
}

/// Apply a 2x2 gate to a qbit. The product is renormalized only to absorb
/// rounding; drift beyond the acceptance for user gates is an error.
pub fn apply_gate(g: &Gate, q: &Qbit) -> Result<Qbit, GateError> {
    if g.dim() != 2 {
        return Err(GateError::DimensionMismatch {
            gate_dim: g.dim(),
            state_dim: 2,
        });
    }
    let out = g
        .matrix
        .mul_vec(&q.as_vector())
        .expect("2x2 gate on a qbit");
    let norm = out.norm();
    let drift = (norm - 1.0).abs();
    if drift > tol::APPLY_DRIFT {
        return Err(GateError::NormDrift { drift });
    }
    let v = out.scale(Complex64::new(1.0 / norm, 0.0));
    Ok(Qbit::from_normalized(v.get(0), v.get(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, eigensystem_2x2, C_ONE};
    use crate::rng::RngStream;
    use crate::state::qbit_new;

    #[test]
    fn diagonalization_operator_matrix_and_involution() {
        let d = diagonalization_operator();
        assert_eq!(d.name(), "D");
        assert_eq!(d.matrix().get(0, 0), C_ZERO);
        assert_eq!(d.matrix().get(0, 1), C_ONE);
        assert_eq!(d.matrix().get(1, 0), C_ONE);
        assert_eq!(d.matrix().get(1, 1), C_ZERO);
        let dd = d.matrix().mul(d.matrix()).unwrap();
        assert_eq!(dd, ComplexMatrix::identity(2));
    }

    #[test]
    fn flip_swaps_basis_states() {
        let d = diagonalization_operator();
        assert_eq!(apply_gate(&d, &Qbit::zero()).unwrap(), Qbit::one());
        assert_eq!(apply_gate(&d, &Qbit::one()).unwrap(), Qbit::zero());
    }

    #[test]
    fn flip_fixes_the_equal_superposition() {
        let d = diagonalization_operator();
        let out = apply_gate(&d, &Qbit::plus()).unwrap();
        assert!(out.phase_equals(&Qbit::plus(), 1e-15));
    }

    #[test]
    fn identity_gate_fixes_everything() {
        let id = identity_gate();
        for q in [Qbit::zero(), Qbit::one(), Qbit::plus()] {
            assert_eq!(apply_gate(&id, &q).unwrap(), q);
        }
        let pairs = eigensystem_2x2(id.matrix(), tol::UNITARITY).unwrap();
        assert!((pairs[0].0 - C_ONE).norm() < 1e-15);
        assert!((pairs[1].0 - C_ONE).norm() < 1e-15);
    }

    #[test]
    fn catalog_gates_are_unitary() {
        for name in CATALOG_NAMES {
            let g = by_name(name).unwrap();
            assert!(linalg::is_unitary(g.matrix(), tol::UNITARITY).unwrap());
        }
        assert!(matches!(by_name("Q"), Err(GateError::UnknownName { .. })));
    }

    #[test]
    fn gate_from_matrix_accepts_unitaries_and_rejects_shear() {
        let flip = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!(gate_from_matrix("flip", flip).is_ok());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let had = ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap();
        assert!(gate_from_matrix("had", had).is_ok());
        // m^dagger m != I by hand.
        let shear = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(
            gate_from_matrix("shear", shear),
            Err(GateError::NotUnitary { .. })
        ));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            gate_from_matrix("rect", rect),
            Err(GateError::BadDimensions { .. })
        ));
    }

    #[test]
    fn double_flip_returns_input() {
        let d = diagonalization_operator();
        let mut rng = RngStream::new(3, 0);
        for _ in 0..100 {
            let a = Complex64::new(rng.next_gaussian(), rng.next_gaussian());
            let b = Complex64::new(rng.next_gaussian(), rng.next_gaussian());
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let q = qbit_new(a / n, b / n).unwrap();
            let back = apply_gate(&d, &apply_gate(&d, &q).unwrap()).unwrap();
            assert!(back.as_vector().max_abs_diff(&q.as_vector()) < 1e-12);
        }
    }

    #[test]
    fn random_gate_applications_preserve_norm() {
        let mut rng = RngStream::new(29, 0);
        for _ in 0..10_000 {
            let u = ComplexMatrix::random_unitary(2, &mut rng);
            let g = gate_from_matrix("u", u).unwrap();
            let a = Complex64::new(rng.next_gaussian(), rng.next_gaussian());
            let b = Complex64::new(rng.next_gaussian(), rng.next_gaussian());
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let q = qbit_new(a / n, b / n).unwrap();
            let out = apply_gate(&g, &q).unwrap();
            let norm_sqr = out.amp0().norm_sqr() + out.amp1().norm_sqr();
            assert!((norm_sqr - 1.0).abs() < 1e-10);
        }
    }
}
