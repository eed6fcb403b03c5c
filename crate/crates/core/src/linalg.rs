//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here is a plain row-major `Vec<Complex64>` value; operations
//! return new values and never mutate their inputs. Dimensions stay small
//! (side <= 2^10), so there is no sparse storage and the only eigensolver
//! is the closed-form 2x2 one; larger fixed-point problems go through
//! [`nullspace`] instead.

use num_complex::Complex64;
use thiserror::Error;

use crate::rng::RngStream;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("non-finite component at entry {index}")]
    NonFinite { index: usize },
    #[error("zero dimension is not allowed")]
    ZeroDimension,
    #[error("entry count {got} does not match {rows}x{cols}")]
    EntryCount {
        rows: usize,
        cols: usize,
        got: usize,
    },
    #[error("dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is {rows}x{cols}, expected 2x2")]
    NotTwoByTwo { rows: usize, cols: usize },
    #[error("matrix is not normal (commutator max-norm {deviation:.3e})")]
    NotNormal { deviation: f64 },
}

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    /// Build a vector, rejecting NaN/Inf components and zero length.
    pub fn new(entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        if entries.is_empty() {
            return Err(LinalgError::ZeroDimension);
        }
        for (i, c) in entries.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(LinalgError::NonFinite { index: i });
            }
        }
        Ok(Self { entries })
    }

    pub fn from_real(reals: &[f64]) -> Result<Self, LinalgError> {
        Self::new(reals.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![C_ZERO; dim.max(1)],
        }
    }

    /// Computational basis vector |index> in `dim` dimensions.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut entries = vec![C_ZERO; dim.max(1)];
        if index < entries.len() {
            entries[index] = C_ONE;
        }
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.entries[i]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_dim(other)?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_dim(other)?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Inner product <self|other> (conjugate-linear in self).
    pub fn inner(&self, other: &Self) -> Result<Complex64, LinalgError> {
        self.check_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Outer product |self><other|.
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        let rows = self.dim();
        let cols = other.dim();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(self.entries[i] * other.entries[j].conj());
            }
        }
        ComplexMatrix {
            entries,
            rows,
            cols,
        }
    }

    /// Kronecker product |self> (x) |other>.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a * b);
            }
        }
        Self { entries }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.scale(Complex64::new(1.0 / n, 0.0))
        } else {
            self.clone()
        }
    }

    /// Fix the global phase so the first component with modulus above
    /// 1e-9 becomes real and positive. Vectors differing only by a global
    /// phase compare equal after this.
    pub fn phase_normalized(&self) -> Self {
        for c in &self.entries {
            let m = c.norm();
            if m > 1e-9 {
                return self.scale(c.conj() / m);
            }
        }
        self.clone()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &Self) -> Result<(), LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimensionMismatch {
                left_rows: self.dim(),
                left_cols: 1,
                right_rows: other.dim(),
                right_cols: 1,
            });
        }
        Ok(())
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    entries: Vec<Complex64>,
    rows: usize,
    cols: usize,
}

impl ComplexMatrix {
    /// Build a matrix, rejecting NaN/Inf components and shape mismatches.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                rows,
                cols,
                got: entries.len(),
            });
        }
        for (i, c) in entries.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(LinalgError::NonFinite { index: i });
            }
        }
        Ok(Self {
            entries,
            rows,
            cols,
        })
    }

    /// Build from rows of real numbers (convenience for tests and gates).
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LinalgError::EntryCount {
                    rows: r,
                    cols: c,
                    got: row.len(),
                });
            }
            entries.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::new(r, c, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            entries: vec![C_ZERO; rows.max(1) * cols.max(1)],
            rows: rows.max(1),
            cols: cols.max(1),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..m.rows {
            m.entries[i * m.cols + i] = C_ONE;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(other)?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
            rows: self.rows,
            cols: self.cols,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(other)?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
            rows: self.rows,
            cols: self.cols,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|c| c * factor).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut entries = vec![C_ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.entries[i * self.cols + k];
                if aik == C_ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    entries[i * other.cols + j] += aik * other.entries[k * other.cols + j];
                }
            }
        }
        Ok(Self {
            entries,
            rows: self.rows,
            cols: other.cols,
        })
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> Result<ComplexVector, LinalgError> {
        if self.cols != v.dim() {
            return Err(LinalgError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: v.dim(),
                right_cols: 1,
            });
        }
        let mut out = vec![C_ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = C_ZERO;
            for j in 0..self.cols {
                acc += self.entries[i * self.cols + j] * v.entries[j];
            }
            out[i] = acc;
        }
        Ok(ComplexVector { entries: out })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.entries[i * self.cols + j].conj());
            }
        }
        Self {
            entries,
            rows: self.cols,
            cols: self.rows,
        }
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.rows.min(self.cols);
        (0..n).map(|i| self.entries[i * self.cols + i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        self.max_abs_diff(&self.adjoint()) <= tolerance
    }

    /// (self + self^dagger) / 2; washes rounding off nearly Hermitian values.
    pub fn hermitized(&self) -> Self {
        self.add(&self.adjoint())
            .expect("square matrix")
            .scale(Complex64::new(0.5, 0.0))
    }

    /// Haar-ish random unitary: complex Gaussian entries orthonormalized
    /// column by column. Deterministic for a given stream.
    pub fn random_unitary(dim: usize, rng: &mut RngStream) -> Self {
        let cols: Vec<ComplexVector> = (0..dim)
            .map(|_| {
                let entries = (0..dim)
                    .map(|_| Complex64::new(rng.next_gaussian(), rng.next_gaussian()))
                    .collect();
                ComplexVector { entries }
            })
            .collect();
        let ortho = gram_schmidt(&cols);
        let mut m = Self::zeros(dim, dim);
        for (j, v) in ortho.iter().enumerate() {
            for i in 0..dim {
                m.entries[i * dim + j] = v.entries[i];
            }
        }
        m
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        Ok(())
    }
}

/// Kronecker product a (x) b. Entry (i*rows_b + k, j*cols_b + l) is
/// a[i,j] * b[k,l].
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut entries = vec![C_ZERO; rows * cols];
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.entries[i * a.cols + j];
            if aij == C_ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    entries[(i * b.rows + k) * cols + (j * b.cols + l)] =
                        aij * b.entries[k * b.cols + l];
                }
            }
        }
    }
    ComplexMatrix {
        entries,
        rows,
        cols,
    }
}

/// Trace out one subsystem of a bipartite operator. `dims` are the
/// subsystem dimensions (index = i0*dims.1 + i1) and `keep` selects which
/// side survives: 0 keeps the first factor, 1 the second.
pub fn partial_trace(
    rho: &ComplexMatrix,
    dims: (usize, usize),
    keep: usize,
) -> Result<ComplexMatrix, LinalgError> {
    let (d0, d1) = dims;
    if d0 == 0 || d1 == 0 {
        return Err(LinalgError::ZeroDimension);
    }
    if !rho.is_square() || rho.rows != d0 * d1 {
        return Err(LinalgError::DimensionMismatch {
            left_rows: rho.rows,
            left_cols: rho.cols,
            right_rows: d0 * d1,
            right_cols: d0 * d1,
        });
    }
    let side = rho.rows;
    let out_dim = if keep == 0 { d0 } else { d1 };
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    if keep == 0 {
        for i in 0..d0 {
            for j in 0..d0 {
                let mut acc = C_ZERO;
                for k in 0..d1 {
                    acc += rho.entries[(i * d1 + k) * side + (j * d1 + k)];
                }
                out.entries[i * d0 + j] = acc;
            }
        }
    } else {
        for i in 0..d1 {
            for j in 0..d1 {
                let mut acc = C_ZERO;
                for k in 0..d0 {
                    acc += rho.entries[(k * d1 + i) * side + (k * d1 + j)];
                }
                out.entries[i * d1 + j] = acc;
            }
        }
    }
    Ok(out)
}

/// True iff the max-norm of (m^dagger m - I) is within `tolerance`.
pub fn is_unitary(m: &ComplexMatrix, tolerance: f64) -> Result<bool, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let gram = m.adjoint().mul(m)?;
    let dev = gram.max_abs_diff(&ComplexMatrix::identity(m.rows));
    Ok(dev <= tolerance)
}

/// Orthonormal basis of the numerical nullspace {v : ||m v|| small},
/// obtained by Gaussian elimination with pivot threshold
/// `tolerance * max(1, ||m||_max)` followed by Gram-Schmidt. Vectors come
/// back phase-normalized, ordered by ascending free column.
pub fn nullspace(m: &ComplexMatrix, tolerance: f64) -> Vec<ComplexVector> {
    let rows = m.rows;
    let cols = m.cols;
    let threshold = tolerance * m.max_norm().max(1.0);

    let mut a = m.entries.clone();
    let mut pivot_cols = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (pr, pv) = (r..rows)
            .map(|i| (i, a[i * cols + c].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pv <= threshold {
            continue;
        }
        if pr != r {
            for j in 0..cols {
                a.swap(r * cols + j, pr * cols + j);
            }
        }
        let piv = a[r * cols + c];
        for j in 0..cols {
            a[r * cols + j] /= piv;
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a[i * cols + c];
            if f.norm() == 0.0 {
                continue;
            }
            for j in 0..cols {
                let sub = f * a[r * cols + j];
                a[i * cols + j] -= sub;
            }
        }
        pivot_cols.push(c);
        r += 1;
    }

    let mut basis = Vec::new();
    for f in 0..cols {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v = vec![C_ZERO; cols];
        v[f] = C_ONE;
        for (k, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[k * cols + f];
        }
        basis.push(ComplexVector { entries: v });
    }

    gram_schmidt(&basis)
        .into_iter()
        .map(|v| v.phase_normalized())
        .collect()
}

/// Closed-form eigensystem of a normal 2x2 matrix via the characteristic
/// polynomial. Eigenpairs come back ordered by descending real part of
/// the eigenvalue, then descending imaginary part; eigenvectors are unit
/// norm, phase-normalized, and orthogonal when the eigenvalues differ.
pub fn eigensystem_2x2(
    m: &ComplexMatrix,
    tolerance: f64,
) -> Result<Vec<(Complex64, ComplexVector)>, LinalgError> {
    if m.rows != 2 || m.cols != 2 {
        return Err(LinalgError::NotTwoByTwo {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let commutator_dev = m
        .adjoint()
        .mul(m)
        .unwrap()
        .max_abs_diff(&m.mul(&m.adjoint()).unwrap());
    let scale = m.max_norm().max(1.0);
    if commutator_dev > tolerance * scale * scale {
        return Err(LinalgError::NotNormal {
            deviation: commutator_dev,
        });
    }

    let m00 = m.get(0, 0);
    let m01 = m.get(0, 1);
    let m10 = m.get(1, 0);
    let m11 = m.get(1, 1);
    let tr = m00 + m11;
    let det = m00 * m11 - m01 * m10;
    let disc = (tr * tr - det.scale(4.0)).sqrt();
    let half = Complex64::new(0.5, 0.0);
    let lambda_a = (tr + disc) * half;
    let lambda_b = (tr - disc) * half;

    let mut eigen = if (lambda_a - lambda_b).norm() <= tolerance * scale {
        // Normal with a double eigenvalue means m = lambda I; any
        // orthonormal pair spans the eigenspace.
        let lambda = tr * half;
        vec![
            (lambda, ComplexVector::basis(2, 0)),
            (lambda, ComplexVector::basis(2, 1)),
        ]
    } else {
        [lambda_a, lambda_b]
            .into_iter()
            .map(|lambda| {
                let cand_a = ComplexVector {
                    entries: vec![m01, lambda - m00],
                };
                let cand_b = ComplexVector {
                    entries: vec![lambda - m11, m10],
                };
                let v = if cand_a.norm() >= cand_b.norm() {
                    cand_a
                } else {
                    cand_b
                };
                (lambda, v.normalized().phase_normalized())
            })
            .collect()
    };

    eigen.sort_by(|(la, _), (lb, _)| {
        lb.re
            .partial_cmp(&la.re)
            .unwrap()
            .then(lb.im.partial_cmp(&la.im).unwrap())
    });
    Ok(eigen)
}

/// Modified Gram-Schmidt; drops vectors that collapse to (near) zero.
fn gram_schmidt(vectors: &[ComplexVector]) -> Vec<ComplexVector> {
    let mut out: Vec<ComplexVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let proj = u.inner(&w).expect("same dimension");
            w = w.sub(&u.scale(proj)).expect("same dimension");
        }
        let n = w.norm();
        if n > 1e-12 {
            out.push(w.scale(Complex64::new(1.0 / n, 0.0)));
        }
    }
    out
}
