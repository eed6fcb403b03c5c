//! Superposition-based merge of conflicting database bits.
//!
//! Two sources disagreeing about a bit normally force a choice. Here the
//! conflict is stored instead as the equal-weight superposition
//! (|a> + |b>)/sqrt(2) of the two claims (the same state that fixes the
//! bit-flip loop), processed unitarily without ever being measured
//! mid-pipeline, and only resolved to a classical bit at the end by a
//! single measurement.
//!
//! Joint processing of k merged records needs a state vector of length
//! 2^k, which is the honest cost of simulating coherence classically;
//! the register cap keeps that at desk scale.

use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

use crate::gates::{apply_gate, Gate, GateError};
use crate::linalg::ComplexVector;
use crate::rng::RngStream;
use crate::sampling;
use crate::state::{qbit_new, sample_measurement, Cbit, Qbit, StateError};

/// Most records that can be processed jointly as one register.
pub const MAX_JOINT_RECORDS: usize = 10;

#[derive(Debug, Error)]
pub enum MergeError {
    #[error("records have different keys: {left:?} vs {right:?}")]
    KeyMismatch { left: String, right: String },
    #[error("record merge is defined on classical records; {key:?} is already quantum")]
    AlreadyQuantum { key: String },
    #[error("a quantum record needs at least two provenance entries, got {got}")]
    ProvenanceTooThin { got: usize },
    #[error("merging {got} sources needs the experimental k-way flag")]
    KWayIsExperimental { got: usize },
    #[error("nothing to merge")]
    NoSources,
    #[error("joint register of {got} records exceeds the {max}-record cap")]
    RegisterTooLarge { got: usize, max: usize },
    #[error("record index {index} out of range for {count} records")]
    RecordIndex { index: usize, count: usize },
    #[error("invalid record line: {0}")]
    InvalidRecord(String),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// The stored state of a fact: a definite bit or a coherent superposition.
#[derive(Debug, Clone, PartialEq)]
pub enum BitState {
    Classical(Cbit),
    Quantum(Qbit),
}

/// One keyed fact with the sources that claimed it.
#[derive(Debug, Clone, PartialEq)]
pub struct FactRecord {
    pub key: String,
    pub state: BitState,
    pub provenance: Vec<String>,
}

impl FactRecord {
    pub fn classical(key: impl Into<String>, value: Cbit, source: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            state: BitState::Classical(value),
            provenance: vec![source.into()],
        }
    }

    /// Assemble a record from parts; quantum records must carry at least
    /// two provenance entries because they only arise from conflicts.
    pub fn from_parts(
        key: String,
        state: BitState,
        provenance: Vec<String>,
    ) -> Result<Self, MergeError> {
        if matches!(state, BitState::Quantum(_)) && provenance.len() < 2 {
            return Err(MergeError::ProvenanceTooThin {
                got: provenance.len(),
            });
        }
        Ok(Self {
            key,
            state,
            provenance,
        })
    }
}

/// Relative phase of the merged superposition. The default is `Plus`;
/// `Minus` selects the orthogonal alternative (the -1 eigenvector of the
/// bit flip) for callers that know they want it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergePhase {
    #[default]
    Plus,
    Minus,
}

/// Merge two claimed bits: agreement passes the bit through, conflict
/// becomes the equal-weight superposition (|a> + |b>)/sqrt(2).
pub fn merge(a: Cbit, b: Cbit) -> BitState {
    merge_with_phase(a, b, MergePhase::Plus)
}

pub fn merge_with_phase(a: Cbit, b: Cbit, phase: MergePhase) -> BitState {
    if a == b {
        return BitState::Classical(a);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = match phase {
        MergePhase::Plus => qbit_new(Complex64::new(s, 0.0), Complex64::new(s, 0.0)),
        MergePhase::Minus => qbit_new(Complex64::new(s, 0.0), Complex64::new(-s, 0.0)),
    };
    BitState::Quantum(q.expect("unit amplitudes"))
}

/// Merge two classical records for the same key, pooling provenance.
pub fn merge_records(a: &FactRecord, b: &FactRecord) -> Result<FactRecord, MergeError> {
    if a.key != b.key {
        return Err(MergeError::KeyMismatch {
            left: a.key.clone(),
            right: b.key.clone(),
        });
    }
    let (BitState::Classical(va), BitState::Classical(vb)) = (&a.state, &b.state) else {
        return Err(MergeError::AlreadyQuantum { key: a.key.clone() });
    };
    let mut provenance = a.provenance.clone();
    provenance.extend(b.provenance.iter().cloned());
    Ok(FactRecord {
        key: a.key.clone(),
        state: merge(*va, *vb),
        provenance,
    })
}

/// Experimental k-way merge: the uniform superposition over the distinct
/// claimed values. Not enabled unless the caller passes the flag, since
/// only the two-source case is on firm ground.
pub fn merge_many(values: &[Cbit], experimental_k_way: bool) -> Result<BitState, MergeError> {
    match values {
        [] => Err(MergeError::NoSources),
        [only] => Ok(BitState::Classical(*only)),
        [a, b] => Ok(merge(*a, *b)),
        many => {
            if !experimental_k_way {
                return Err(MergeError::KWayIsExperimental { got: many.len() });
            }
            let first = many[0];
            if many.iter().all(|&v| v == first) {
                Ok(BitState::Classical(first))
            } else {
                Ok(merge(Cbit::Zero, Cbit::One))
            }
        }
    }
}

/// Run a record through a gate pipeline without measuring. Classical
/// inputs are embedded as basis states as soon as the pipeline is
/// non-empty; the output stays a coherent qbit even when it happens to
/// sit on a basis state.
pub fn process(pipeline: &[Gate], r: &FactRecord) -> Result<FactRecord, MergeError> {
    if pipeline.is_empty() {
        return Ok(r.clone());
    }
    let mut q = match &r.state {
        BitState::Classical(c) => Qbit::from_cbit(*c),
        BitState::Quantum(q) => *q,
    };
    for g in pipeline {
        q = apply_gate(g, &q)?;
    }
    Ok(FactRecord {
        key: r.key.clone(),
        state: BitState::Quantum(q),
        provenance: r.provenance.clone(),
    })
}

/// Resolve a record to a classical bit: classical records return their
/// value, quantum records are measured once.
pub fn resolve(r: &FactRecord, rng: &mut RngStream) -> Cbit {
    match &r.state {
        BitState::Classical(c) => *c,
        BitState::Quantum(q) => sample_measurement(q, rng).0,
    }
}

/// Resolution histogram over `resolutions` independent draws, batched and
/// seed-deterministic. Returns (count of 0, count of 1).
pub fn resolution_counts(
    r: &FactRecord,
    resolutions: u64,
    seed: u64,
    base_stream: u64,
) -> (u64, u64) {
    match &r.state {
        BitState::Classical(Cbit::Zero) => (resolutions, 0),
        BitState::Classical(Cbit::One) => (0, resolutions),
        BitState::Quantum(q) => {
            sampling::bernoulli_counts(q.amp1().norm_sqr(), resolutions, seed, base_stream)
        }
    }
}

/// JSON line for one record.
pub fn to_json_line(r: &FactRecord) -> String {
    let value = match &r.state {
        BitState::Classical(c) => json!({
            "key": r.key,
            "kind": "cbit",
            "value": c.value(),
            "provenance": r.provenance,
        }),
        BitState::Quantum(q) => json!({
            "key": r.key,
            "kind": "qbit",
            "amplitudes": [[q.amp0().re, q.amp0().im], [q.amp1().re, q.amp1().im]],
            "provenance": r.provenance,
        }),
    };
    value.to_string()
}

fn field<'v>(obj: &'v Value, name: &str) -> Result<&'v Value, MergeError> {
    obj.get(name)
        .ok_or_else(|| MergeError::InvalidRecord(format!("missing field {name:?}")))
}

fn amplitude(pair: &Value) -> Result<Complex64, MergeError> {
    let err = || MergeError::InvalidRecord("amplitudes must be [re, im] pairs".to_string());
    let pair = pair.as_array().ok_or_else(err)?;
    if pair.len() != 2 {
        return Err(err());
    }
    let re = pair[0].as_f64().ok_or_else(err)?;
    let im = pair[1].as_f64().ok_or_else(err)?;
    Ok(Complex64::new(re, im))
}

/// Parse one JSON record line.
pub fn from_json_line(line: &str) -> Result<FactRecord, MergeError> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| MergeError::InvalidRecord(e.to_string()))?;
    let key = field(&value, "key")?
        .as_str()
        .ok_or_else(|| MergeError::InvalidRecord("key must be a string".to_string()))?
        .to_string();
    let provenance: Vec<String> = field(&value, "provenance")?
        .as_array()
        .ok_or_else(|| MergeError::InvalidRecord("provenance must be an array".to_string()))?
        .iter()
        .map(|v| {
            v.as_str().map(str::to_string).ok_or_else(|| {
                MergeError::InvalidRecord("provenance entries must be strings".to_string())
            })
        })
        .collect::<Result<_, _>>()?;
    let kind = field(&value, "kind")?
        .as_str()
        .ok_or_else(|| MergeError::InvalidRecord("kind must be a string".to_string()))?;
    let state = match kind {
        "cbit" => {
            let raw = field(&value, "value")?
                .as_u64()
                .ok_or_else(|| MergeError::InvalidRecord("value must be 0 or 1".to_string()))?;
            let bit = u8::try_from(raw)
                .ok()
                .and_then(Cbit::from_value)
                .ok_or_else(|| MergeError::InvalidRecord(format!("value {raw} is not a bit")))?;
            BitState::Classical(bit)
        }
        "qbit" => {
            let amps = field(&value, "amplitudes")?.as_array().ok_or_else(|| {
                MergeError::InvalidRecord("amplitudes must be an array".to_string())
            })?;
            if amps.len() != 2 {
                return Err(MergeError::InvalidRecord(
                    "amplitudes must hold exactly two pairs".to_string(),
                ));
            }
            let a = amplitude(&amps[0])?;
            let b = amplitude(&amps[1])?;
            BitState::Quantum(qbit_new(a, b)?)
        }
        other => {
            return Err(MergeError::InvalidRecord(format!(
                "kind must be \"cbit\" or \"qbit\", got {other:?}"
            )));
        }
    };
    FactRecord::from_parts(key, state, provenance)
}

/// k records simulated jointly as one 2^k-amplitude register.
#[derive(Debug, Clone, PartialEq)]
pub struct JointRegister {
    keys: Vec<String>,
    amplitudes: ComplexVector,
}

impl JointRegister {
    pub fn new(records: &[FactRecord]) -> Result<Self, MergeError> {
        if records.is_empty() {
            return Err(MergeError::NoSources);
        }
        if records.len() > MAX_JOINT_RECORDS {
            return Err(MergeError::RegisterTooLarge {
                got: records.len(),
                max: MAX_JOINT_RECORDS,
            });
        }
        let mut amplitudes: Option<ComplexVector> = None;
        let mut keys = Vec::with_capacity(records.len());
        for r in records {
            keys.push(r.key.clone());
            let local = match &r.state {
                BitState::Classical(c) => Qbit::from_cbit(*c).as_vector(),
                BitState::Quantum(q) => q.as_vector(),
            };
            amplitudes = Some(match amplitudes {
                None => local,
                Some(acc) => acc.tensor(&local),
            });
        }
        Ok(Self {
            keys,
            amplitudes: amplitudes.expect("at least one record"),
        })
    }

    pub fn record_count(&self) -> usize {
        self.keys.len()
    }

    /// Length of the joint state vector: exactly 2^k for k records.
    pub fn state_len(&self) -> usize {
        self.amplitudes.dim()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// Apply a one-qbit gate to record `index` inside the register.
    pub fn apply_to(&self, index: usize, g: &Gate) -> Result<Self, MergeError> {
        let k = self.record_count();
        if index >= k {
            return Err(MergeError::RecordIndex { index, count: k });
        }
        if g.dim() != 2 {
            return Err(MergeError::Gate(GateError::DimensionMismatch {
                gate_dim: g.dim(),
                state_dim: 2,
            }));
        }
        // Record 0 is the leftmost tensor factor, so it owns the highest
        // bit of the register index.
        let stride = 1usize << (k - 1 - index);
        let m = g.matrix();
        let mut out = self.amplitudes.entries().to_vec();
        for base in 0..self.state_len() {
            if base & stride != 0 {
                continue;
            }
            let hi = base | stride;
            let a0 = self.amplitudes.get(base);
            let a1 = self.amplitudes.get(hi);
            out[base] = m.get(0, 0) * a0 + m.get(0, 1) * a1;
            out[hi] = m.get(1, 0) * a0 + m.get(1, 1) * a1;
        }
        Ok(Self {
            keys: self.keys.clone(),
            amplitudes: ComplexVector::new(out).expect("finite"),
        })
    }
}
