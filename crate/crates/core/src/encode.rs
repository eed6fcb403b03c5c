//! JSON encoding for core values.
//!
//! Complex numbers encode as `[re, im]` pairs, vectors as arrays of
//! pairs, matrices as arrays of rows of pairs. Every machine-readable
//! surface of the crate uses this one convention.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::state::{DensityMatrix, Qbit};

pub fn complex_pair(c: Complex64) -> Value {
    json!([c.re, c.im])
}

pub fn vector_pairs(v: &ComplexVector) -> Value {
    Value::Array(v.entries().iter().map(|&c| complex_pair(c)).collect())
}

pub fn matrix_rows(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| complex_pair(m.get(i, j))).collect()))
            .collect(),
    )
}

pub fn qbit_pairs(q: &Qbit) -> Value {
    json!([complex_pair(q.amp0()), complex_pair(q.amp1())])
}

pub fn density_rows(rho: &DensityMatrix) -> Value {
    matrix_rows(rho.matrix())
}
