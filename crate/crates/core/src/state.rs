//! Classical bits, qbits, and density matrices.
//!
//! A cbit is strictly 0 or 1. A qbit is a normalized coherent
//! superposition a|0> + b|1>; the constructor accepts amplitudes whose
//! squared norm is within 1e-6 of one and renormalizes them, so stored
//! states are unit norm to machine precision. Measurement outcomes follow
//! the Born rule and are identified with signal symbols as |0> = "-",
//! |1> = "+".

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{ComplexMatrix, ComplexVector, C_ONE, C_ZERO};
use crate::rng::RngStream;
use crate::tol;

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("qbit amplitudes are both zero")]
    ZeroAmplitudes,
    #[error("qbit amplitude is not finite")]
    NonFinite,
    #[error("|a|^2 + |b|^2 = {norm_sqr} is outside the acceptance window around 1")]
    NormOutsideWindow { norm_sqr: f64 },
    #[error("density matrix is not square")]
    DensityNotSquare,
    #[error("density matrix side {side} is not a power of two")]
    DensityNotPowerOfTwo { side: usize },
    #[error("density matrix is not Hermitian (deviation {deviation:.3e})")]
    DensityNotHermitian { deviation: f64 },
    #[error("density matrix trace is {trace}, expected 1")]
    DensityTraceNotOne { trace: Complex64 },
    #[error("density matrix has an eigenvalue below the -{floor:.1e} floor")]
    DensityNotPositive { floor: f64 },
}

/// A classical bit: exactly 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cbit {
    Zero,
    One,
}

impl Cbit {
    pub fn value(self) -> u8 {
        match self {
            Cbit::Zero => 0,
            Cbit::One => 1,
        }
    }

    pub fn from_value(v: u8) -> Option<Self> {
        match v {
            0 => Some(Cbit::Zero),
            1 => Some(Cbit::One),
            _ => None,
        }
    }

    /// Signal symbol: |0> = '-', |1> = '+'.
    pub fn sign_symbol(self) -> char {
        match self {
            Cbit::Zero => '-',
            Cbit::One => '+',
        }
    }
}

impl std::fmt::Display for Cbit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// A normalized one-qbit pure state a|0> + b|1>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qbit {
    amp0: Complex64,
    amp1: Complex64,
}

/// Build a qbit from amplitudes, renormalizing inputs whose squared norm
/// is within the acceptance window of 1 and rejecting everything else.
pub fn qbit_new(a: Complex64, b: Complex64) -> Result<Qbit, StateError> {
    if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
        return Err(StateError::NonFinite);
    }
    let norm_sqr = a.norm_sqr() + b.norm_sqr();
    if norm_sqr < 1e-12 {
        return Err(StateError::ZeroAmplitudes);
    }
    if (norm_sqr - 1.0).abs() > tol::NORM_WINDOW {
        return Err(StateError::NormOutsideWindow { norm_sqr });
    }
    let inv = 1.0 / norm_sqr.sqrt();
    Ok(Qbit {
        amp0: a.scale(inv),
        amp1: b.scale(inv),
    })
}

impl Qbit {
    /// The basis state |0>.
    pub fn zero() -> Self {
        Qbit {
            amp0: C_ONE,
            amp1: C_ZERO,
        }
    }

    /// The basis state |1>.
    pub fn one() -> Self {
        Qbit {
            amp0: C_ZERO,
            amp1: C_ONE,
        }
    }

    /// The equal-weight superposition (|0> + |1>)/sqrt(2).
    pub fn plus() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Qbit { amp0: s, amp1: s }
    }

    pub fn from_cbit(c: Cbit) -> Self {
        match c {
            Cbit::Zero => Qbit::zero(),
            Cbit::One => Qbit::one(),
        }
    }

    /// Internal: amplitudes already unit norm (e.g. after a unitary).
    pub(crate) fn from_normalized(amp0: Complex64, amp1: Complex64) -> Self {
        Qbit { amp0, amp1 }
    }

    pub fn amp0(&self) -> Complex64 {
        self.amp0
    }

    pub fn amp1(&self) -> Complex64 {
        self.amp1
    }

    pub fn as_vector(&self) -> ComplexVector {
        ComplexVector::new(vec![self.amp0, self.amp1]).expect("finite amplitudes")
    }

    /// Equality up to a global phase.
    pub fn phase_equals(&self, other: &Qbit, tolerance: f64) -> bool {
        self.as_vector()
            .phase_normalized()
            .max_abs_diff(&other.as_vector().phase_normalized())
            <= tolerance
    }
}

/// Born-rule probabilities (|a|^2, |b|^2).
pub fn born_probabilities(q: &Qbit) -> (f64, f64) {
    (q.amp0.norm_sqr(), q.amp1.norm_sqr())
}

/// Measure in the {|0>, |1>} basis, consuming one uniform draw. Returns
/// the outcome and the state collapsed onto it.
pub fn sample_measurement(q: &Qbit, rng: &mut RngStream) -> (Cbit, Qbit) {
    let (_, p1) = born_probabilities(q);
    let outcome = if rng.next_f64() < p1 {
        Cbit::One
    } else {
        Cbit::Zero
    };
    (outcome, Qbit::from_cbit(outcome))
}

/// The pure-state projector |q><q|.
pub fn to_density(q: &Qbit) -> DensityMatrix {
    let v = q.as_vector();
    DensityMatrix::new(v.outer(&v)).expect("projector of a unit vector is a density matrix")
}

/// A mixed state: Hermitian, trace one, eigenvalues above the floor,
/// side a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, StateError> {
        if !matrix.is_square() {
            return Err(StateError::DensityNotSquare);
        }
        let side = matrix.rows();
        if !side.is_power_of_two() {
            return Err(StateError::DensityNotPowerOfTwo { side });
        }
        let deviation = matrix.max_abs_diff(&matrix.adjoint());
        if deviation > tol::DENSITY_HERMITIAN {
            return Err(StateError::DensityNotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol::DENSITY_TRACE || trace.im.abs() > tol::DENSITY_TRACE {
            return Err(StateError::DensityTraceNotOne { trace });
        }
        if !is_psd_within_floor(&matrix, tol::DENSITY_EIGEN_FLOOR) {
            return Err(StateError::DensityNotPositive {
                floor: tol::DENSITY_EIGEN_FLOOR,
            });
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(side: usize) -> Self {
        let m = ComplexMatrix::identity(side).scale(Complex64::new(1.0 / side as f64, 0.0));
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn side(&self) -> usize {
        self.matrix.rows()
    }

    /// tr(rho^2); 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.matrix.mul(&self.matrix).expect("square").trace().re
    }

    /// Probability of basis outcome `index` under a computational-basis
    /// measurement (the diagonal entry, clamped against rounding).
    pub fn basis_probability(&self, index: usize) -> f64 {
        self.matrix.get(index, index).re.clamp(0.0, 1.0)
    }
}

/// Cholesky-style test that `hermitized(m) + floor * I` is positive
/// semidefinite. Exact enough for the sides this crate uses.
fn is_psd_within_floor(m: &ComplexMatrix, floor: f64) -> bool {
    let h = m.hermitized();
    let n = h.rows();
    let scale = h.max_norm().max(1.0);
    let breakdown = 1e-12 * scale;
    let mut l = vec![C_ZERO; n * n];
    for j in 0..n {
        let mut d = h.get(j, j).re + floor;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if d < -breakdown {
            return false;
        }
        let ljj = d.max(0.0).sqrt();
        l[j * n + j] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut s = h.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            if ljj > breakdown {
                l[i * n + j] = s / ljj;
            } else if s.norm() > 1e-6 * scale {
                // Zero pivot with mass below it: indefinite.
                return false;
            } else {
                l[i * n + j] = C_ZERO;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn qbit_basis_state() {
        let q = qbit_new(C_ONE, C_ZERO).unwrap();
        assert_eq!(q, Qbit::zero());
    }

    #[test]
    fn qbit_equal_superposition() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = qbit_new(c(s, 0.0), c(s, 0.0)).unwrap();
        assert!(q.phase_equals(&Qbit::plus(), 1e-15));
    }

    #[test]
    fn qbit_renormalizes_inside_window() {
        let q = qbit_new(c(1.0 + 1e-7, 0.0), C_ZERO).unwrap();
        assert!((q.amp0() - C_ONE).norm() < 1e-12);
        assert_eq!(q.amp1(), C_ZERO);
    }

    #[test]
    fn qbit_rejects_zero_and_far_from_unit() {
        assert_eq!(qbit_new(C_ZERO, C_ZERO), Err(StateError::ZeroAmplitudes));
        assert!(matches!(
            qbit_new(c(2.0, 0.0), C_ZERO),
            Err(StateError::NormOutsideWindow { .. })
        ));
        assert_eq!(
            qbit_new(c(f64::NAN, 0.0), C_ONE),
            Err(StateError::NonFinite)
        );
    }

    #[test]
    fn born_probabilities_examples() {
        assert_eq!(born_probabilities(&Qbit::zero()), (1.0, 0.0));
        let (p0, p1) = born_probabilities(&Qbit::plus());
        assert!((p0 - 0.5).abs() < 1e-15 && (p1 - 0.5).abs() < 1e-15);
        // Moduli squared by hand: 0.36 and 0.64, phases arbitrary.
        let a = Complex64::from_polar(0.6, 1.1);
        let b = Complex64::from_polar(0.8, -2.3);
        let (p0, p1) = born_probabilities(&qbit_new(a, b).unwrap());
        assert!((p0 - 0.36).abs() < 1e-12 && (p1 - 0.64).abs() < 1e-12);
        assert!((p0 + p1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_of_basis_state_is_deterministic() {
        for seed in [0u64, 1, 99] {
            let mut rng = RngStream::new(seed, 0);
            let (outcome, collapsed) = sample_measurement(&Qbit::one(), &mut rng);
            assert_eq!(outcome, Cbit::One);
            assert_eq!(collapsed, Qbit::one());
        }
    }

    #[test]
    fn measurement_sequences_reproduce_per_seed_and_stream() {
        let draw = || {
            let mut rng = RngStream::new(5, 8);
            (0..64)
                .map(|_| sample_measurement(&Qbit::plus(), &mut rng).0)
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn fair_coin_frequency_within_three_sigma() {
        let mut rng = RngStream::new(42, 0);
        let n = 100_000u32;
        let zeros = (0..n)
            .filter(|_| sample_measurement(&Qbit::plus(), &mut rng).0 == Cbit::Zero)
            .count() as f64;
        let freq = zeros / f64::from(n);
        assert!((0.495..=0.505).contains(&freq), "freq = {freq}");
    }

    #[test]
    fn to_density_examples() {
        let rho = to_density(&Qbit::zero());
        assert_eq!(rho.matrix().get(0, 0), C_ONE);
        assert_eq!(rho.matrix().get(1, 1), C_ZERO);

        // Outer product of (1,1)/sqrt(2) with itself: all entries 1/2.
        let rho = to_density(&Qbit::plus());
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho.matrix().get(i, j) - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn global_phase_leaves_density_and_born_unchanged() {
        for theta in [0.3, 1.0, 2.5, 4.0] {
            let phase = Complex64::from_polar(1.0, theta);
            let q = qbit_new(phase, C_ZERO).unwrap();
            let rho = to_density(&q);
            assert!((rho.matrix().get(0, 0) - C_ONE).norm() < 1e-12);
            assert!(rho.matrix().get(0, 1).norm() < 1e-12);
            let (p0, p1) = born_probabilities(&q);
            assert!((p0 - 1.0).abs() < 1e-12 && p1 < 1e-12);
        }
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::zeros(2, 3)).is_err());
        let not_trace_one = ComplexMatrix::identity(2);
        assert!(matches!(
            DensityMatrix::new(not_trace_one),
            Err(StateError::DensityTraceNotOne { .. })
        ));
        let not_hermitian =
            ComplexMatrix::new(2, 2, vec![c(0.5, 0.0), c(0.5, 0.0), C_ZERO, c(0.5, 0.0)]).unwrap();
        assert!(matches!(
            DensityMatrix::new(not_hermitian),
            Err(StateError::DensityNotHermitian { .. })
        ));
        // diag(1.5, -0.5): Hermitian, trace one, indefinite.
        let indefinite =
            ComplexMatrix::new(2, 2, vec![c(1.5, 0.0), C_ZERO, C_ZERO, c(-0.5, 0.0)]).unwrap();
        assert!(matches!(
            DensityMatrix::new(indefinite),
            Err(StateError::DensityNotPositive { .. })
        ));
        let three = ComplexMatrix::identity(3).scale(c(1.0 / 3.0, 0.0));
        assert!(matches!(
            DensityMatrix::new(three),
            Err(StateError::DensityNotPowerOfTwo { side: 3 })
        ));
    }

    #[test]
    fn maximally_mixed_is_valid() {
        for side in [2usize, 4, 8] {
            let rho = DensityMatrix::maximally_mixed(side);
            assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
            assert!((rho.purity() - 1.0 / side as f64).abs() < 1e-12);
        }
    }
}
