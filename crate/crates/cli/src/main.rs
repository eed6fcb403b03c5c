//! Command-line front end for the qloop simulator.
//!
//! Every command echoes its run manifest (command, seed, shot count,
//! format, tool version) alongside the result, so any published number
//! can be reproduced from the output alone. Output on stdout is data
//! only; diagnostics go to stderr. Floats are rounded to 15 significant
//! digits before serialization, and shot sampling is batched with
//! per-batch RNG streams, so repeated runs with identical flags produce
//! byte-identical output regardless of worker threads.
//!
//! Exit codes: 0 ok, 2 bad gate or matrix, 3 scenario parse error,
//! 4 validation error, 1 I/O or internal failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qloop_core::dbmerge::{self, BitState, FactRecord};
use qloop_core::epr::{self, LoopMode};
use qloop_core::fixedpoint;
use qloop_core::gates::{self, Gate};
use qloop_core::linalg::ComplexMatrix;
use qloop_core::scenario;
use qloop_core::state::Cbit;
use qloop_core::RngStream;

const EXIT_IO: u8 = 1;
const EXIT_BAD_GATE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qloop",
    version,
    about = "Quantum loop-consistency simulator: fixed points, telegraph correlations, bit merges"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Classical,
    Quantum,
}

#[derive(Args)]
struct GateSelector {
    /// Catalog gate name (D, ID, X, Y, Z, H)
    #[arg(long, group = "operator", required = true)]
    gate: Option<String>,
    /// Matrix literal, e.g. "[0,1;1,0]" (complex entries: 0.5+0.5i)
    #[arg(long, group = "operator")]
    matrix: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Fixed-point analysis of a policy gate
    Analyze {
        #[command(flatten)]
        operator: GateSelector,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run a scenario file in classical or quantum mode
    Run {
        scenario_path: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the scenario's shot count
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Analytic and sampled singlet correlation at two angles
    Correlate {
        /// Left measurement angle in radians, or "pi"
        alpha: String,
        /// Right measurement angle in radians, or "pi"
        beta: String,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Merge two bits, run a gate pipeline, and resolve repeatedly
    Merge {
        #[arg(value_parser = clap::value_parser!(u8).range(0..=1))]
        a: u8,
        #[arg(value_parser = clap::value_parser!(u8).range(0..=1))]
        b: u8,
        /// Comma-separated catalog gate names applied before resolution
        #[arg(long, value_delimiter = ',')]
        pipeline: Vec<String>,
        #[arg(long, default_value_t = 10_000)]
        resolutions: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Parse and validate a scenario file, printing its canonical form
    ParseCheck {
        scenario_path: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Analyze { operator, format } => cmd_analyze(operator, format),
        Command::Run {
            scenario_path,
            mode,
            seed,
            shots,
            format,
        } => cmd_run(&scenario_path, mode, seed, shots, format),
        Command::Correlate {
            alpha,
            beta,
            shots,
            seed,
            format,
        } => cmd_correlate(&alpha, &beta, shots, seed, format),
        Command::Merge {
            a,
            b,
            pipeline,
            resolutions,
            seed,
            format,
        } => cmd_merge(a, b, &pipeline, resolutions, seed, format),
        Command::ParseCheck {
            scenario_path,
            format,
        } => cmd_parse_check(&scenario_path, format),
    }
}

fn manifest(
    command: &str,
    seed: u64,
    scenario_path: Option<&PathBuf>,
    shots: u64,
    format: Format,
) -> Value {
    json!({
        "command": command,
        "seed": seed,
        "scenario_path": scenario_path.map(|p| p.display().to_string()),
        "shots": shots,
        "output_format": format.as_str(),
        "tool_version": env!("CARGO_PKG_VERSION"),
    })
}

fn resolve_operator(selector: &GateSelector) -> Result<Gate, Failure> {
    if let Some(name) = &selector.gate {
        return gates::by_name(name).map_err(|e| Failure::new(EXIT_BAD_GATE, e.to_string()));
    }
    let literal = selector
        .matrix
        .as_ref()
        .expect("clap group guarantees one of --gate/--matrix");
    let entries = scenario::parse_matrix_literal(literal)
        .map_err(|e| Failure::new(EXIT_BAD_GATE, format!("bad matrix literal: {}", e.detail())))?;
    let m = ComplexMatrix::new(2, 2, entries.to_vec())
        .map_err(|e| Failure::new(EXIT_BAD_GATE, e.to_string()))?;
    gates::gate_from_matrix("matrix", m).map_err(|e| Failure::new(EXIT_BAD_GATE, e.to_string()))
}

fn cmd_analyze(selector: GateSelector, format: Format) -> Result<(), Failure> {
    let gate = resolve_operator(&selector)?;
    let report = fixedpoint::analyze(&gate);
    let mut result = report.to_json();
    result
        .as_object_mut()
        .expect("report is an object")
        .insert("gate".to_string(), json!(gate.name()));
    emit(manifest("analyze", 0, None, 0, format), result, format);
    Ok(())
}

fn load_scenario(path: &PathBuf) -> Result<(scenario::Validated, String), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))?;
    let ast = scenario::parse(&text).map_err(|e| {
        Failure::new(
            EXIT_PARSE,
            format!("{}: parse error at {}", path.display(), e.detail()),
        )
    })?;
    let validated = scenario::validate(&ast, &gates::CATALOG_NAMES).map_err(|diags| {
        let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        Failure::new(
            EXIT_VALIDATION,
            format!("{}: {}", path.display(), lines.join("; ")),
        )
    })?;
    Ok((validated, text))
}

fn cmd_run(
    path: &PathBuf,
    mode: Mode,
    seed: u64,
    shots: Option<u64>,
    format: Format,
) -> Result<(), Failure> {
    let (validated, _) = load_scenario(path)?;
    for warning in &validated.warnings {
        eprintln!("{warning}");
    }
    let mut loop_scenario = validated.scenario;
    if let Some(n) = shots {
        loop_scenario.shots = n;
    }
    let loop_mode = match mode {
        Mode::Classical => LoopMode::Classical,
        Mode::Quantum => LoopMode::Quantum,
    };
    let result = epr::run_loop(&loop_scenario, loop_mode, RngStream::new(seed, 0))
        .map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))?;
    let mut value = result.to_json();
    value
        .as_object_mut()
        .expect("loop result is an object")
        .insert("scenario_name".to_string(), json!(loop_scenario.name));
    emit(
        manifest("run", seed, Some(path), loop_scenario.shots, format),
        value,
        format,
    );
    Ok(())
}

fn cmd_correlate(
    alpha: &str,
    beta: &str,
    shots: u64,
    seed: u64,
    format: Format,
) -> Result<(), Failure> {
    let parse_angle = |text: &str| {
        scenario::parse_angle_literal(text)
            .map_err(|e| Failure::new(EXIT_BAD_GATE, format!("bad angle {text:?}: {}", e.detail())))
    };
    let alpha = parse_angle(alpha)?;
    let beta = parse_angle(beta)?;
    let analytic = epr::correlation(alpha, beta);
    let counts = epr::sample_pair_counts(alpha, beta, shots, seed, 0);
    let sampled = counts.product_mean();
    let result = json!({
        "alpha": alpha,
        "beta": beta,
        "analytic": analytic,
        "sampled": sampled,
        "difference": (analytic - sampled).abs(),
        "counts": {
            "plus_plus": counts.plus_plus,
            "plus_minus": counts.plus_minus,
            "minus_plus": counts.minus_plus,
            "minus_minus": counts.minus_minus,
        },
    });
    emit(
        manifest("correlate", seed, None, shots, format),
        result,
        format,
    );
    Ok(())
}

fn bit_state_json(state: &BitState) -> Value {
    match state {
        BitState::Classical(c) => json!({ "kind": "cbit", "value": c.value() }),
        BitState::Quantum(q) => json!({
            "kind": "qbit",
            "amplitudes": qloop_core::encode::qbit_pairs(q),
        }),
    }
}

fn cmd_merge(
    a: u8,
    b: u8,
    pipeline_names: &[String],
    resolutions: u64,
    seed: u64,
    format: Format,
) -> Result<(), Failure> {
    let a = Cbit::from_value(a).expect("clap range");
    let b = Cbit::from_value(b).expect("clap range");
    let pipeline: Vec<Gate> = pipeline_names
        .iter()
        .map(|name| gates::by_name(name).map_err(|e| Failure::new(EXIT_BAD_GATE, e.to_string())))
        .collect::<Result<_, _>>()?;

    let merged_state = dbmerge::merge(a, b);
    let merged = FactRecord::from_parts(
        "merge".to_string(),
        merged_state,
        vec!["left".to_string(), "right".to_string()],
    )
    .expect("two provenance entries");
    let processed = dbmerge::process(&pipeline, &merged)
        .map_err(|e| Failure::new(EXIT_BAD_GATE, e.to_string()))?;
    let (zeros, ones) = dbmerge::resolution_counts(&processed, resolutions, seed, 0);

    let result = json!({
        "merged": bit_state_json(&merged.state),
        "processed": bit_state_json(&processed.state),
        "pipeline": pipeline_names,
        "histogram": { "zero": zeros, "one": ones },
    });
    emit(
        manifest("merge", seed, None, resolutions, format),
        result,
        format,
    );
    Ok(())
}

fn cmd_parse_check(path: &PathBuf, format: Format) -> Result<(), Failure> {
    let (validated, _) = load_scenario(path)?;
    let canonical = scenario::serialize(&validated.scenario);
    let warnings: Vec<String> = validated.warnings.iter().map(|w| w.to_string()).collect();
    let result = json!({
        "valid": true,
        "scenario_name": validated.scenario.name,
        "telegraphs": validated.scenario.telegraphs.len(),
        "canonical": canonical,
        "warnings": warnings,
    });
    emit(
        manifest("parse-check", 0, Some(path), 0, format),
        result,
        format,
    );
    Ok(())
}

/// Round to 15 significant digits so output bytes are stable across
/// platforms and reruns.
fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(14 - magnitude);
    (x * factor).round() / factor
}

fn round_floats(value: Value) -> Value {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                let rounded = round_significant(n.as_f64().expect("checked"));
                serde_json::Number::from_f64(rounded)
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            } else {
                Value::Number(n)
            }
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

/// Flatten JSON into dotted key/value rows for the CSV format.
fn flatten(prefix: &str, value: &Value, rows: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, rows);
            }
        }
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => rows.push((prefix.to_string(), n.to_string())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
    }
}

fn csv_cell(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn emit(manifest: Value, result: Value, format: Format) {
    let document = round_floats(json!({ "manifest": manifest, "result": result }));
    match format {
        Format::Json => {
            println!("{document}");
        }
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", &document, &mut rows);
            let mut out = String::from("key,value\n");
            for (k, v) in rows {
                out.push_str(&format!("{},{}\n", csv_cell(&k), csv_cell(&v)));
            }
            print!("{out}");
        }
    }
}
