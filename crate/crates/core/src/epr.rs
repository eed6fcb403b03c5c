//! Singlet-pair correlations and the two-telegraph loop simulator.
//!
//! A telegraph is a singlet source with one prepared ("active") arm and
//! one measured ("passive") arm; at relative angle pi the two arms agree
//! perfectly, so preparing a symbol on one side fixes the reading on the
//! other. Two telegraphs chained through a mirror relay close the loop:
//! whatever the agent emits comes back as its own earlier input, composed
//! with the relay and the agent policy. Classically the loop admits only
//! bit assignments fixed by that composition; quantum mechanically it is
//! simulated from a fixed-point state of the composed unitary.
//!
//! Outcome control on the active arm is the counterfactual the loop takes
//! for granted; here it is modeled as plain state preparation, not as a
//! claim about physics.

use serde_json::{json, Value};
use thiserror::Error;

use crate::encode;
use crate::fixedpoint::{self, ClassicalMap};
use crate::gates::Gate;
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::rng::RngStream;
use crate::sampling;
use crate::state::{qbit_new, Cbit, DensityMatrix, Qbit};
use crate::tol;

#[derive(Debug, Error)]
pub enum LoopError {
    #[error("{role} gate acts on dimension {got}, the loop wire carries one qbit")]
    GateDimension { role: &'static str, got: usize },
    #[error("loop needs exactly two telegraphs, scenario has {got}")]
    NotClosedLoop { got: usize },
    #[error("event label {label:?} appears twice in the order")]
    DuplicateEvent { label: String },
    #[error("{role} gate {name:?} is not a basis-state map; classical mode is undefined")]
    NotClassical { role: &'static str, name: String },
    #[error("loop has no fixed point: {0}")]
    NoFixedPoint(#[from] fixedpoint::SolverError),
}

/// The two-particle state (|01> - |10>)/sqrt(2).
#[derive(Debug, Clone, PartialEq)]
pub struct SingletPair {
    state: ComplexVector,
}

pub fn singlet() -> SingletPair {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    SingletPair {
        state: ComplexVector::from_real(&[0.0, s, -s, 0.0]).expect("finite"),
    }
}

impl SingletPair {
    pub fn state(&self) -> &ComplexVector {
        &self.state
    }

    pub fn projector(&self) -> ComplexMatrix {
        self.state.outer(&self.state)
    }

    /// Exchange the two subsystems (index i0*2+i1 -> i1*2+i0).
    pub fn swapped(&self) -> ComplexVector {
        let e = self.state.entries();
        ComplexVector::new(vec![e[0], e[2], e[1], e[3]]).expect("finite")
    }
}

/// Analytic expectation of the +/-1 outcome product for singlet spin
/// measurements along in-plane angles alpha and beta: -cos(alpha - beta).
pub fn correlation(alpha: f64, beta: f64) -> f64 {
    -(alpha - beta).cos()
}

/// Joint probability of outcomes (s, t) in {-1,+1}^2 at angles
/// (alpha, beta): (1 - s*t*cos(alpha - beta)) / 4.
pub fn joint_probability(alpha: f64, beta: f64, s: i8, t: i8) -> f64 {
    (1.0 - f64::from(s) * f64::from(t) * (alpha - beta).cos()) / 4.0
}

/// Draw one outcome pair from the singlet joint distribution.
pub fn sample_pair(alpha: f64, beta: f64, rng: &mut RngStream) -> (i8, i8) {
    const OUTCOMES: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
    let u = rng.next_f64();
    let mut acc = 0.0;
    for &(s, t) in &OUTCOMES {
        acc += joint_probability(alpha, beta, s, t);
        if u < acc {
            return (s, t);
        }
    }
    OUTCOMES[3]
}

/// Outcome-pair counts over a batched, seed-deterministic run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub plus_plus: u64,
    pub plus_minus: u64,
    pub minus_plus: u64,
    pub minus_minus: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.plus_plus + self.plus_minus + self.minus_plus + self.minus_minus
    }

    /// How many pairs disagreed.
    pub fn discordant(&self) -> u64 {
        self.plus_minus + self.minus_plus
    }

    /// Empirical mean of the outcome product.
    pub fn product_mean(&self) -> f64 {
        let agree = (self.plus_plus + self.minus_minus) as f64;
        let differ = self.discordant() as f64;
        (agree - differ) / self.total().max(1) as f64
    }

    /// Empirical frequency of "+" on the left arm.
    pub fn left_plus_frequency(&self) -> f64 {
        (self.plus_plus + self.plus_minus) as f64 / self.total().max(1) as f64
    }

    /// Empirical frequency of "+" on the right arm.
    pub fn right_plus_frequency(&self) -> f64 {
        (self.plus_plus + self.minus_plus) as f64 / self.total().max(1) as f64
    }
}

/// Sample `shots` outcome pairs in deterministic batches.
pub fn sample_pair_counts(
    alpha: f64,
    beta: f64,
    shots: u64,
    seed: u64,
    base_stream: u64,
) -> PairCounts {
    let weights = [
        joint_probability(alpha, beta, 1, 1),
        joint_probability(alpha, beta, 1, -1),
        joint_probability(alpha, beta, -1, 1),
        joint_probability(alpha, beta, -1, -1),
    ];
    let counts = sampling::categorical_counts(&weights, shots, seed, base_stream);
    PairCounts {
        plus_plus: counts[0],
        plus_minus: counts[1],
        minus_plus: counts[2],
        minus_minus: counts[3],
    }
}

/// One telegraph: active (prepared) arm angle and passive (measured) arm
/// angle. The perfect-correlation configuration has the two angles a
/// relative angle pi apart.
#[derive(Debug, Clone, PartialEq)]
pub struct TelegraphConfig {
    pub name: String,
    pub active_angle: f64,
    pub passive_angle: f64,
}

impl TelegraphConfig {
    pub fn relative_angle(&self) -> f64 {
        (self.active_angle - self.passive_angle).abs()
    }

    pub fn is_perfectly_correlated(&self) -> bool {
        (self.relative_angle() - std::f64::consts::PI).abs() <= tol::ANGLE
    }
}

/// The relay sitting between the two telegraphs.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorConfig {
    pub name: String,
    pub relay: Gate,
}

/// A closed signalling loop: two telegraphs, a mirror relay, and the
/// agent policy applied between reception and emission.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopScenario {
    pub name: String,
    pub telegraphs: Vec<TelegraphConfig>,
    pub mirror: MirrorConfig,
    pub agent_policy: Gate,
    pub event_order: Vec<String>,
    pub shots: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopMode {
    Classical,
    Quantum,
}

impl LoopMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LoopMode::Classical => "classical",
            LoopMode::Quantum => "quantum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeHistogram {
    pub plus: u64,
    pub minus: u64,
}

/// What a loop run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopResult {
    pub mode: LoopMode,
    /// Classical mode: surviving loop-wire assignments as sign symbols.
    pub consistent_assignments: Option<Vec<String>>,
    /// Quantum mode: measured symbol counts at the agent boundary.
    pub outcome_histogram: Option<OutcomeHistogram>,
    /// Present when the loop has a one-dimensional pure fixed space.
    pub fixed_point_used: Option<Qbit>,
    pub paradox: bool,
}

impl LoopResult {
    pub fn to_json(&self) -> Value {
        json!({
            "mode": self.mode.as_str(),
            "consistent_assignments": self.consistent_assignments,
            "outcome_histogram": self.outcome_histogram.map(|h| json!({
                "plus": h.plus,
                "minus": h.minus,
            })),
            "fixed_point_used": self.fixed_point_used.as_ref().map(encode::qbit_pairs),
            "paradox": self.paradox,
        })
    }
}

/// The loop map as seen at the agent boundary: policy first (reception to
/// emission), then the mirror relay carrying the emission back.
fn loop_unitary(s: &LoopScenario) -> ComplexMatrix {
    s.mirror
        .relay
        .matrix()
        .mul(s.agent_policy.matrix())
        .expect("both 2x2")
}

fn check_loop(s: &LoopScenario) -> Result<(), LoopError> {
    if s.agent_policy.dim() != 2 {
        return Err(LoopError::GateDimension {
            role: "policy",
            got: s.agent_policy.dim(),
        });
    }
    if s.mirror.relay.dim() != 2 {
        return Err(LoopError::GateDimension {
            role: "mirror",
            got: s.mirror.relay.dim(),
        });
    }
    if s.telegraphs.len() != 2 {
        return Err(LoopError::NotClosedLoop {
            got: s.telegraphs.len(),
        });
    }
    let mut seen = std::collections::HashSet::new();
    for label in &s.event_order {
        if !seen.insert(label) {
            return Err(LoopError::DuplicateEvent {
                label: label.clone(),
            });
        }
    }
    Ok(())
}

/// Run the loop. Classical mode enumerates loop-wire bit assignments and
/// keeps the ones the composed relay-after-policy map fixes. Quantum mode
/// samples measurement rounds from a fixed-point state of the composed
/// unitary: the pure fixed direction when it is unique, the uniform
/// mixture over the fixed basis when it is degenerate, and the channel
/// fixed point when no pure fixed state exists.
pub fn run_loop(s: &LoopScenario, mode: LoopMode, rng: RngStream) -> Result<LoopResult, LoopError> {
    check_loop(s)?;
    match mode {
        LoopMode::Classical => {
            let policy_map = ClassicalMap::from_gate(&s.agent_policy).ok_or_else(|| {
                LoopError::NotClassical {
                    role: "policy",
                    name: s.agent_policy.name().to_string(),
                }
            })?;
            let relay_map = ClassicalMap::from_gate(&s.mirror.relay).ok_or_else(|| {
                LoopError::NotClassical {
                    role: "mirror",
                    name: s.mirror.relay.name().to_string(),
                }
            })?;
            let assignments: Vec<String> = [Cbit::Zero, Cbit::One]
                .into_iter()
                .filter(|c| {
                    let x = c.value() as usize;
                    relay_map.apply(policy_map.apply(x)) == x
                })
                .map(|c| c.sign_symbol().to_string())
                .collect();
            let paradox = assignments.is_empty();
            Ok(LoopResult {
                mode,
                consistent_assignments: Some(assignments),
                outcome_histogram: None,
                fixed_point_used: None,
                paradox,
            })
        }
        LoopMode::Quantum => {
            let composed = loop_unitary(s);
            let shifted = composed
                .sub(&ComplexMatrix::identity(2))
                .expect("same shape");
            let eigen = linalg::nullspace(&shifted, tol::NULLSPACE_PIVOT);
            let (fixed_point_used, p_plus) = match eigen.len() {
                0 => {
                    let env = DensityMatrix::maximally_mixed(1);
                    let found = fixedpoint::channel_fixed_point(
                        &composed,
                        (1, 2),
                        &env,
                        tol::CHANNEL_RESIDUAL,
                        tol::CHANNEL_MAX_ITER,
                    )?;
                    (None, found.rho.basis_probability(1))
                }
                1 => {
                    let q = qbit_new(eigen[0].get(0), eigen[0].get(1))
                        .expect("nullspace vectors are unit norm");
                    let p1 = q.amp1().norm_sqr();
                    (Some(q), p1)
                }
                _ => {
                    // Degenerate fixed space: the loop map is the identity
                    // and the max-entropy representative I/2 drives the
                    // sampling.
                    (None, 0.5)
                }
            };
            let (minus, plus) =
                sampling::bernoulli_counts(p_plus, s.shots, rng.seed(), rng.stream_id());
            Ok(LoopResult {
                mode,
                consistent_assignments: None,
                outcome_histogram: Some(OutcomeHistogram { plus, minus }),
                fixed_point_used,
                paradox: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::linalg::partial_trace;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// Loop scenario in the two-telegraph layout with a chosen policy.
    fn loop_scenario(policy: Gate) -> LoopScenario {
        LoopScenario {
            name: "loop".to_string(),
            telegraphs: vec![
                TelegraphConfig {
                    name: "t1".to_string(),
                    active_angle: 0.0,
                    passive_angle: PI,
                },
                TelegraphConfig {
                    name: "t2".to_string(),
                    active_angle: 0.0,
                    passive_angle: PI,
                },
            ],
            mirror: MirrorConfig {
                name: "m".to_string(),
                relay: gates::identity_gate(),
            },
            agent_policy: policy,
            event_order: vec!["tS".into(), "tB".into(), "tA".into()],
            shots: 10_000,
        }
    }

    #[test]
    fn singlet_is_normalized_and_antisymmetric() {
        let pair = singlet();
        assert!((pair.state().norm() - 1.0).abs() < 1e-15);
        let negated = pair.state().scale(num_complex::Complex64::new(-1.0, 0.0));
        assert!(pair.swapped().max_abs_diff(&negated) < 1e-15);
    }

    #[test]
    fn singlet_reduced_states_are_maximally_mixed() {
        let rho = singlet().projector();
        let half = ComplexMatrix::identity(2).scale(num_complex::Complex64::new(0.5, 0.0));
        for keep in [0, 1] {
            let reduced = partial_trace(&rho, (2, 2), keep).unwrap();
            assert!(reduced.max_abs_diff(&half) < 1e-15);
        }
    }

    #[test]
    fn correlation_values() {
        assert_eq!(correlation(0.0, PI), 1.0);
        assert_eq!(correlation(0.0, 0.0), -1.0);
        assert!(correlation(0.0, FRAC_PI_2).abs() < 1e-15);
    }

    /// Independent Born-rule route: measurement bases rotated in-plane,
    /// outcome probabilities from amplitudes of the singlet.
    fn born_rule_correlation(alpha: f64, beta: f64) -> f64 {
        let basis = |theta: f64, sign: i8| {
            let (s, c) = (theta / 2.0).sin_cos();
            if sign > 0 {
                ComplexVector::from_real(&[c, s]).unwrap()
            } else {
                ComplexVector::from_real(&[-s, c]).unwrap()
            }
        };
        let psi = singlet();
        let mut expectation = 0.0;
        for s in [1i8, -1] {
            for t in [1i8, -1] {
                let bra = basis(alpha, s).tensor(&basis(beta, t));
                let amp = bra.inner(psi.state()).unwrap();
                expectation += f64::from(s) * f64::from(t) * amp.norm_sqr();
            }
        }
        expectation
    }

    #[test]
    fn analytic_correlation_matches_born_rule_route() {
        let angles = [0.0, 0.4, FRAC_PI_2, 1.9, PI, 4.0, 5.5, -0.7];
        for &alpha in &angles {
            for &beta in &angles {
                let analytic = correlation(alpha, beta);
                let oracle = born_rule_correlation(alpha, beta);
                assert!(
                    (analytic - oracle).abs() < 1e-12,
                    "alpha={alpha} beta={beta}: {analytic} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn joint_distribution_is_normalized_with_fair_marginals() {
        for delta in [0.0, 0.3, FRAC_PI_2, PI, 2.2] {
            let mut total = 0.0;
            let mut left_plus = 0.0;
            for s in [1i8, -1] {
                for t in [1i8, -1] {
                    let p = joint_probability(0.0, delta, s, t);
                    assert!(p >= 0.0);
                    total += p;
                    if s > 0 {
                        left_plus += p;
                    }
                }
            }
            assert!((total - 1.0).abs() < 1e-15);
            assert!((left_plus - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn perfect_correlation_at_relative_angle_pi() {
        let mut rng = RngStream::new(1, 0);
        for _ in 0..1000 {
            let (s, t) = sample_pair(0.0, PI, &mut rng);
            assert_eq!(s, t);
        }
        let counts = sample_pair_counts(0.0, PI, 100_000, 1, 0);
        assert_eq!(counts.discordant(), 0);
        assert!(counts.product_mean() >= 0.999);
    }

    #[test]
    fn perfect_anticorrelation_at_equal_angles() {
        let mut rng = RngStream::new(2, 0);
        for _ in 0..1000 {
            let (s, t) = sample_pair(0.0, 0.0, &mut rng);
            assert_eq!(s, -t);
        }
        let counts = sample_pair_counts(0.0, 0.0, 100_000, 2, 0);
        assert_eq!(counts.plus_plus + counts.minus_minus, 0);
        assert!(counts.product_mean() <= -0.999);
    }

    #[test]
    fn orthogonal_angles_give_vanishing_product_mean() {
        let counts = sample_pair_counts(0.0, FRAC_PI_2, 100_000, 3, 0);
        assert!(counts.product_mean().abs() < 0.012);
    }

    #[test]
    fn empirical_correlation_tracks_analytic_on_a_grid() {
        let n = 100_000u64;
        let pairs = [
            (0.0, PI),
            (0.0, 0.0),
            (0.0, FRAC_PI_2),
            (0.3, 1.1),
            (1.0, 2.5),
            (2.0, 0.4),
            (0.7, 3.9),
            (5.0, 1.3),
        ];
        for (i, &(alpha, beta)) in pairs.iter().enumerate() {
            let counts = sample_pair_counts(alpha, beta, n, 100 + i as u64, 0);
            let analytic = correlation(alpha, beta);
            // Product variance is 1 - E^2; 4 sigma bound on the mean.
            let sigma = ((1.0 - analytic * analytic).max(1e-12) / n as f64).sqrt();
            let dev = (counts.product_mean() - analytic).abs();
            assert!(
                dev <= 4.0 * sigma + 1e-9,
                "({alpha},{beta}): dev {dev} > 4 sigma {sigma}"
            );
            // Marginals stay fair regardless of angles.
            let m_sigma = 4.0 * (0.25 / n as f64).sqrt();
            assert!((counts.left_plus_frequency() - 0.5).abs() <= m_sigma);
            assert!((counts.right_plus_frequency() - 0.5).abs() <= m_sigma);
        }
    }

    #[test]
    fn classical_loop_with_flip_policy_is_paradoxical() {
        let result = run_loop(
            &loop_scenario(gates::diagonalization_operator()),
            LoopMode::Classical,
            RngStream::new(0, 0),
        )
        .unwrap();
        assert!(result.paradox);
        assert_eq!(result.consistent_assignments, Some(vec![]));
        assert!(result.outcome_histogram.is_none());
    }

    #[test]
    fn classical_loop_with_identity_policy_keeps_both_symbols() {
        let result = run_loop(
            &loop_scenario(gates::identity_gate()),
            LoopMode::Classical,
            RngStream::new(0, 0),
        )
        .unwrap();
        assert!(!result.paradox);
        assert_eq!(
            result.consistent_assignments,
            Some(vec!["-".to_string(), "+".to_string()])
        );
    }

    #[test]
    fn classical_loop_agrees_with_fixed_point_enumeration() {
        for policy in [
            gates::diagonalization_operator(),
            gates::identity_gate(),
            gates::pauli_z(),
        ] {
            let scenario = loop_scenario(policy.clone());
            let result = run_loop(&scenario, LoopMode::Classical, RngStream::new(0, 0)).unwrap();
            let map = ClassicalMap::from_gate(&policy).unwrap();
            let expected: Vec<String> = fixedpoint::classical_fixed_points(&map)
                .iter()
                .map(|bits| if bits == "0" { "-".into() } else { "+".into() })
                .collect();
            assert_eq!(result.consistent_assignments, Some(expected));
        }
    }

    #[test]
    fn quantum_loop_with_flip_policy_uses_the_equal_superposition() {
        let mut scenario = loop_scenario(gates::diagonalization_operator());
        scenario.shots = 100_000;
        let result = run_loop(&scenario, LoopMode::Quantum, RngStream::new(42, 0)).unwrap();
        assert!(!result.paradox);
        let fp = result.fixed_point_used.unwrap();
        assert!(fp.phase_equals(&Qbit::plus(), 1e-10));
        let out = gates::apply_gate(&gates::diagonalization_operator(), &fp).unwrap();
        assert!(out.phase_equals(&fp, 1e-10));
        let hist = result.outcome_histogram.unwrap();
        assert_eq!(hist.plus + hist.minus, 100_000);
        assert!(
            (49_500..=50_500).contains(&hist.plus),
            "plus = {}",
            hist.plus
        );
        assert!((49_500..=50_500).contains(&hist.minus));
    }

    #[test]
    fn quantum_loop_is_seed_deterministic() {
        let scenario = loop_scenario(gates::diagonalization_operator());
        let a = run_loop(&scenario, LoopMode::Quantum, RngStream::new(7, 3)).unwrap();
        let b = run_loop(&scenario, LoopMode::Quantum, RngStream::new(7, 3)).unwrap();
        assert_eq!(a, b);
        let c = run_loop(&scenario, LoopMode::Quantum, RngStream::new(8, 3)).unwrap();
        assert_ne!(
            a.outcome_histogram.unwrap().plus,
            c.outcome_histogram.unwrap().plus
        );
    }

    #[test]
    fn quantum_loop_with_identity_policy_samples_maximally_mixed() {
        let mut scenario = loop_scenario(gates::identity_gate());
        scenario.shots = 100_000;
        let result = run_loop(&scenario, LoopMode::Quantum, RngStream::new(5, 0)).unwrap();
        assert!(result.fixed_point_used.is_none());
        let hist = result.outcome_histogram.unwrap();
        assert!((49_500..=50_500).contains(&hist.plus));
    }

    #[test]
    fn quantum_loop_without_pure_fixed_point_falls_back_to_channel() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                linalg::C_ZERO,
                linalg::C_ONE,
                num_complex::Complex64::new(-1.0, 0.0),
                linalg::C_ZERO,
            ],
        )
        .unwrap();
        let policy = gates::gate_from_matrix("R", m).unwrap();
        let result = run_loop(
            &loop_scenario(policy),
            LoopMode::Quantum,
            RngStream::new(11, 0),
        )
        .unwrap();
        assert!(result.fixed_point_used.is_none());
        let hist = result.outcome_histogram.unwrap();
        assert_eq!(hist.plus + hist.minus, 10_000);
    }

    #[test]
    fn loop_validation_errors() {
        let mut one_arm = loop_scenario(gates::diagonalization_operator());
        one_arm.telegraphs.truncate(1);
        assert!(matches!(
            run_loop(&one_arm, LoopMode::Classical, RngStream::new(0, 0)),
            Err(LoopError::NotClosedLoop { got: 1 })
        ));

        let mut repeated = loop_scenario(gates::diagonalization_operator());
        repeated.event_order = vec!["tA".into(), "tB".into(), "tA".into()];
        assert!(matches!(
            run_loop(&repeated, LoopMode::Classical, RngStream::new(0, 0)),
            Err(LoopError::DuplicateEvent { .. })
        ));

        let superposing = loop_scenario(gates::hadamard());
        assert!(matches!(
            run_loop(&superposing, LoopMode::Classical, RngStream::new(0, 0)),
            Err(LoopError::NotClassical { .. })
        ));
    }

    #[test]
    fn loop_result_json_shape() {
        let scenario = loop_scenario(gates::diagonalization_operator());
        let classical = run_loop(&scenario, LoopMode::Classical, RngStream::new(0, 0))
            .unwrap()
            .to_json();
        assert_eq!(classical["mode"], "classical");
        assert_eq!(classical["paradox"], true);
        assert!(classical["outcome_histogram"].is_null());

        let quantum = run_loop(&scenario, LoopMode::Quantum, RngStream::new(0, 0))
            .unwrap()
            .to_json();
        assert_eq!(quantum["mode"], "quantum");
        assert_eq!(quantum["paradox"], false);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amp = quantum["fixed_point_used"][0][0].as_f64().unwrap();
        assert!((amp - s).abs() < 1e-10);
    }
}
