//! The `.scn` scenario language: parse, validate, serialize.
//!
//! A scenario file declares the telegraphs, the mirror relay, the agent
//! policy, the event order, and a shot count. [`parse`] produces a raw
//! AST with source positions, [`validate`] resolves it against the gate
//! catalog into a runnable [`LoopScenario`], and [`serialize`] renders a
//! canonical form that re-parses to an equivalent scenario.
//!
//! Canonical form materializes defaults (identity mirror "M", order
//! tS < tB < tA, shots 10000), so `parse . serialize . parse` is a fixed
//! point on it.

mod lex;
mod parse;

use num_complex::Complex64;
use thiserror::Error;

use crate::epr::{LoopScenario, MirrorConfig, TelegraphConfig};
use crate::gates::{self, Gate};

pub use parse::{parse, parse_angle_literal, parse_matrix_literal};

/// A node with the 1-based source position of its first token.
#[derive(Debug, Clone, PartialEq)]
pub struct Spanned<T> {
    pub node: T,
    pub line: usize,
    pub column: usize,
}

/// Raw parse tree of one scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioAst {
    pub name: String,
    pub declarations: Vec<Spanned<Decl>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    Telegraph {
        name: String,
        active: f64,
        passive: f64,
    },
    Mirror {
        name: String,
        gate: Option<String>,
    },
    Agent {
        policy: PolicySpec,
    },
    Order {
        events: Vec<String>,
    },
    Shots {
        count: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    Named(String),
    /// Row-major 2x2 entries.
    Matrix([Complex64; 4]),
}

/// First-failure parse error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    /// Human-readable form including the expected alternatives.
    pub fn detail(&self) -> String {
        if self.expected.is_empty() {
            format!("{self}")
        } else {
            format!("{self} (expected {})", self.expected.join(", "))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// One validation finding, anchored to the declaration it concerns.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{tag} at line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

/// A validated scenario plus any non-fatal findings.
#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub scenario: LoopScenario,
    pub warnings: Vec<Diagnostic>,
}

fn error_at(line: usize, column: usize, message: String) -> Diagnostic {
    Diagnostic {
        severity: Severity::Error,
        line,
        column,
        message,
    }
}

/// Resolve an AST against the gate catalog. Errors cover structural
/// violations (telegraph count, duplicate or missing declarations,
/// repeated order labels, unknown gates, non-unitary matrices, zero
/// shots); an imperfect telegraph angle is only a warning because the
/// loop still runs, just without perfect correlations.
pub fn validate(ast: &ScenarioAst, catalog: &[&str]) -> Result<Validated, Vec<Diagnostic>> {
    let mut errors: Vec<Diagnostic> = Vec::new();
    let mut warnings: Vec<Diagnostic> = Vec::new();

    let mut telegraphs: Vec<TelegraphConfig> = Vec::new();
    let mut mirror: Option<MirrorConfig> = None;
    let mut agent: Option<Gate> = None;
    let mut order: Option<Vec<String>> = None;
    let mut shots: Option<u64> = None;

    let resolve_gate = |name: &str, line: usize, column: usize, errors: &mut Vec<Diagnostic>| {
        if !catalog.contains(&name) {
            errors.push(error_at(
                line,
                column,
                format!("unknown gate name \"{name}\""),
            ));
            return None;
        }
        match gates::by_name(name) {
            Ok(g) => Some(g),
            Err(e) => {
                errors.push(error_at(line, column, e.to_string()));
                None
            }
        }
    };

    for decl in &ast.declarations {
        let (line, column) = (decl.line, decl.column);
        match &decl.node {
            Decl::Telegraph {
                name,
                active,
                passive,
            } => {
                if telegraphs.len() == 2 {
                    errors.push(error_at(
                        line,
                        column,
                        "at most two telegraphs are allowed".to_string(),
                    ));
                    continue;
                }
                let config = TelegraphConfig {
                    name: name.clone(),
                    active_angle: *active,
                    passive_angle: *passive,
                };
                if !config.is_perfectly_correlated() {
                    warnings.push(Diagnostic {
                        severity: Severity::Warning,
                        line,
                        column,
                        message: format!(
                            "imperfect correlation: telegraph \"{name}\" has relative angle \
                             {:.6}, perfect correlations need pi",
                            config.relative_angle()
                        ),
                    });
                }
                telegraphs.push(config);
            }
            Decl::Mirror { name, gate } => {
                if mirror.is_some() {
                    errors.push(error_at(
                        line,
                        column,
                        "duplicate mirror declaration".to_string(),
                    ));
                    continue;
                }
                let relay = match gate {
                    Some(g) => resolve_gate(g, line, column, &mut errors),
                    None => Some(gates::identity_gate()),
                };
                if let Some(relay) = relay {
                    mirror = Some(MirrorConfig {
                        name: name.clone(),
                        relay,
                    });
                }
            }
            Decl::Agent { policy } => {
                if agent.is_some() {
                    errors.push(error_at(
                        line,
                        column,
                        "duplicate agent declaration".to_string(),
                    ));
                    continue;
                }
                match policy {
                    PolicySpec::Named(name) => {
                        agent = resolve_gate(name, line, column, &mut errors);
                    }
                    PolicySpec::Matrix(entries) => {
                        let m = crate::linalg::ComplexMatrix::new(2, 2, entries.to_vec())
                            .expect("finite literals");
                        match gates::gate_from_matrix("policy", m) {
                            Ok(g) => agent = Some(g),
                            Err(e) => {
                                errors.push(error_at(
                                    line,
                                    column,
                                    format!("agent policy matrix rejected: {e}"),
                                ));
                            }
                        }
                    }
                }
            }
            Decl::Order { events } => {
                if order.is_some() {
                    errors.push(error_at(
                        line,
                        column,
                        "duplicate order declaration".to_string(),
                    ));
                    continue;
                }
                let mut seen = std::collections::HashSet::new();
                for label in events {
                    if !seen.insert(label.clone()) {
                        errors.push(error_at(
                            line,
                            column,
                            format!("event label \"{label}\" repeated: order must be strict"),
                        ));
                    }
                }
                order = Some(events.clone());
            }
            Decl::Shots { count } => {
                if shots.is_some() {
                    errors.push(error_at(
                        line,
                        column,
                        "duplicate shots declaration".to_string(),
                    ));
                    continue;
                }
                if *count == 0 {
                    errors.push(error_at(line, column, "shots must be positive".to_string()));
                    continue;
                }
                shots = Some(*count);
            }
        }
    }

    if telegraphs.is_empty() {
        errors.push(error_at(1, 1, "scenario declares no telegraph".to_string()));
    }
    if agent.is_none() && !errors.iter().any(|e| e.message.contains("agent")) {
        errors.push(error_at(1, 1, "missing agent declaration".to_string()));
    }

    if !errors.is_empty() {
        return Err(errors);
    }

    let scenario = LoopScenario {
        name: ast.name.clone(),
        telegraphs,
        mirror: mirror.unwrap_or_else(|| MirrorConfig {
            name: "M".to_string(),
            relay: gates::identity_gate(),
        }),
        agent_policy: agent.expect("checked above"),
        event_order: order
            .unwrap_or_else(|| vec!["tS".to_string(), "tB".to_string(), "tA".to_string()]),
        shots: shots.unwrap_or(10_000),
    };
    Ok(Validated { scenario, warnings })
}

fn format_number(x: f64) -> String {
    format!("{x}")
}

fn format_angle(x: f64) -> String {
    if x == std::f64::consts::PI {
        "pi".to_string()
    } else {
        format_number(x)
    }
}

fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format_number(c.re)
    } else if c.re == 0.0 {
        format!("{}i", format_number(c.im))
    } else if c.im < 0.0 {
        format!("{}-{}i", format_number(c.re), format_number(-c.im))
    } else {
        format!("{}+{}i", format_number(c.re), format_number(c.im))
    }
}

fn format_policy(g: &Gate) -> String {
    if gates::CATALOG_NAMES.contains(&g.name()) {
        g.name().to_string()
    } else {
        let m = g.matrix();
        format!(
            "[{}, {}; {}, {}]",
            format_complex(m.get(0, 0)),
            format_complex(m.get(0, 1)),
            format_complex(m.get(1, 0)),
            format_complex(m.get(1, 1)),
        )
    }
}

/// Canonical text for a scenario: declarations in a fixed order with all
/// defaults spelled out. Re-parsing and re-validating the output yields
/// an equal [`LoopScenario`], and re-serializing yields the same string.
pub fn serialize(s: &LoopScenario) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario \"{}\"\n", s.name));
    for t in &s.telegraphs {
        out.push_str(&format!(
            "telegraph {} active {} passive {}\n",
            t.name,
            format_angle(t.active_angle),
            format_angle(t.passive_angle),
        ));
    }
    out.push_str(&format!(
        "mirror {} gate {}\n",
        s.mirror.name,
        s.mirror.relay.name()
    ));
    out.push_str(&format!(
        "agent policy {}\n",
        format_policy(&s.agent_policy)
    ));
    out.push_str(&format!("order {}\n", s.event_order.join(" < ")));
    out.push_str(&format!("shots {}\n", s.shots));
    out
}
