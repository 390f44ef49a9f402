//! `rotset`: validate, compute and check rotation-set models.
//!
//! JSON goes to stdout, the human-readable report to stderr. Exit codes:
//! 0 success, 1 a requested check failed, 2 invalid input, 3 resource cap.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rotset_core::analysis::{InteriorVerdict, DEFAULT_PROBE_DENSITY};
use rotset_core::config::EngineConfig;
use rotset_core::fixtures;
use rotset_core::model::{LoadError, ModelDocument};
use rotset_core::pipeline::{CheckOptions, Engine, Failure, ResultDocument, VerificationReport};
use rotset_core::validation::{Violation, ViolationKind};
use serde_json::json;

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rotset",
    version,
    about = "Exact homological rotation sets of symbolic Axiom A surface models"
)]
struct Cli {
    /// Run every stage on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Cap on simple cycles enumerated per piece.
    #[arg(long, global = true, value_name = "N")]
    cycle_cap: Option<usize>,
    /// Cap on grid points per convexity probe.
    #[arg(long, global = true, value_name = "N")]
    probe_cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a model and report every violation.
    Validate { model: String },
    /// Compute piece, chain and block polytopes.
    Compute {
        model: String,
        #[command(flatten)]
        output: Output,
    },
    /// Compute and run the requested checks (all structural checks when none is given).
    Check {
        model: String,
        #[arg(long)]
        star: bool,
        #[arg(long)]
        bound: bool,
        #[arg(long)]
        subspace: bool,
        #[arg(long, value_name = "N")]
        convex_density: Option<usize>,
        #[arg(long)]
        interior: bool,
        /// Sampled chain averages per chain, checked against chains and blocks.
        #[arg(long, value_name = "N")]
        oracle_samples: Option<usize>,
        #[arg(long, value_name = "S", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Print an embedded example model.
    Fixture {
        name: String,
        #[arg(long, value_name = "FILE")]
        write: Option<PathBuf>,
    },
    /// List the embedded example models.
    ListFixtures,
}

#[derive(Args)]
struct Output {
    /// Write the result JSON here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Also write block vertices as CSV rows `label,p/q,...`.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

/// A command outcome: exit code plus optional JSON for stdout.
struct Outcome {
    code: u8,
    json: Option<String>,
}

impl Outcome {
    fn ok(json: String) -> Self {
        Self {
            code: 0,
            json: Some(json),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = if cli.sequential {
        EngineConfig::sequential()
    } else {
        EngineConfig::default()
    };
    if let Some(n) = cli.cycle_cap {
        config.cycle_cap = n;
    }
    if let Some(n) = cli.probe_cap {
        config.probe_cap = n;
    }
    let engine = Engine::new(config);
    let outcome = run(&engine, cli.command);
    if let Some(json) = outcome.json {
        // A closed pipe (e.g. `| head`) is not an error worth reporting.
        let _ = writeln!(std::io::stdout().lock(), "{json}");
    }
    ExitCode::from(outcome.code)
}

fn run(engine: &Engine, command: Command) -> Outcome {
    match command {
        Command::Validate { model } => with_model(&model, |m| validate(engine, m)),
        Command::Compute { model, output } => with_model(&model, |m| match engine.compute(m) {
            Ok(doc) => {
                eprint!("{}", summary(&doc));
                emit(&doc, &output, 0)
            }
            Err(f) => failure(f),
        }),
        Command::Check {
            model,
            star,
            bound,
            subspace,
            convex_density,
            interior,
            oracle_samples,
            seed,
            output,
        } => {
            let mut opts = CheckOptions {
                star,
                bound,
                subspace,
                convex_density,
                interior,
                oracle_samples,
                seed,
            };
            if !(star || bound || subspace || interior) && convex_density.is_none() && oracle_samples.is_none() {
                opts = CheckOptions {
                    seed,
                    ..CheckOptions::all(DEFAULT_PROBE_DENSITY)
                };
            }
            with_model(&model, |m| match engine.check(m, &opts) {
                Ok(doc) => {
                    let v = doc.verification.as_ref().expect("check attaches a report");
                    eprint!("{}{}", summary(&doc), report(v));
                    emit(&doc, &output, if v.passed { 0 } else { EXIT_FAILED })
                }
                Err(f) => failure(f),
            })
        }
        Command::Fixture { name, write } => match fixtures::fixture(&name) {
            Ok(m) => match write {
                Some(path) => match std::fs::write(&path, m.to_json() + "\n") {
                    Ok(()) => {
                        eprintln!("wrote {}", path.display());
                        Outcome { code: 0, json: None }
                    }
                    Err(e) => io_error(&path, &e),
                },
                None => Outcome::ok(m.to_json()),
            },
            Err(e) => {
                eprintln!("error: {e}");
                error_outcome(EXIT_INVALID, "unknown_fixture", &e.to_string(), &[])
            }
        },
        Command::ListFixtures => {
            let list: Vec<_> = fixtures::catalog()
                .into_iter()
                .map(|f| {
                    eprintln!("{:<18} {}", f.name, f.summary);
                    json!({"name": f.name, "summary": f.summary})
                })
                .collect();
            Outcome::ok(serde_json::to_string_pretty(&list).expect("serializable"))
        }
    }
}

/// Resolves `arg` as a file path, else as a fixture name.
fn resolve(arg: &str) -> Result<ModelDocument, LoadError> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Ok(m) = fixtures::fixture(arg) {
            return Ok(m);
        }
    }
    let bytes = std::fs::read(path).map_err(|e| LoadError::Io {
        path: arg.to_string(),
        message: e.to_string(),
    })?;
    ModelDocument::parse(&bytes)
}

fn with_model(arg: &str, f: impl FnOnce(&ModelDocument) -> Outcome) -> Outcome {
    match resolve(arg) {
        Ok(m) => f(&m),
        Err(LoadError::Invalid(v)) => invalid(v),
        Err(e) => {
            eprintln!("error: {e}");
            let (kind, path) = match &e {
                LoadError::Io { path, .. } => ("io", path.clone()),
                LoadError::Parse { path, .. } => ("parse", path.clone()),
                LoadError::Invalid(_) => unreachable!(),
            };
            let mut out = error_json(kind, &e.to_string());
            out["error"]["path"] = json!(path);
            Outcome {
                code: EXIT_INVALID,
                json: Some(serde_json::to_string_pretty(&out).expect("serializable")),
            }
        }
    }
}

fn validate(engine: &Engine, m: &ModelDocument) -> Outcome {
    let r = engine.validate(m);
    for v in &r.violations {
        eprintln!("violation: {v}");
    }
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    if r.is_valid() {
        eprintln!("valid: genus {}, {} pieces", m.genus, m.pieces.len());
    }
    let code = if r.is_valid() {
        0
    } else if r.has_resource_violation() {
        EXIT_RESOURCE
    } else {
        EXIT_INVALID
    };
    let out = json!({
        "valid": r.is_valid(),
        "input_digest": m.digest(),
        "violations": r.violations,
        "warnings": r.warnings,
    });
    Outcome {
        code,
        json: Some(serde_json::to_string_pretty(&out).expect("serializable")),
    }
}

fn emit(doc: &ResultDocument, output: &Output, code: u8) -> Outcome {
    if let Some(path) = &output.csv {
        if let Err(e) = std::fs::write(path, doc.blocks_csv()) {
            return io_error(path, &e);
        }
    }
    match &output.out {
        Some(path) => match std::fs::write(path, doc.to_json() + "\n") {
            Ok(()) => Outcome { code, json: None },
            Err(e) => io_error(path, &e),
        },
        None => Outcome {
            code,
            json: Some(doc.to_json()),
        },
    }
}

fn failure(f: Failure) -> Outcome {
    match f {
        Failure::Invalid(v) => invalid(v),
        Failure::Engine(e) => {
            eprintln!("error: {e}");
            let (code, kind) = if e.is_resource_cap() {
                (EXIT_RESOURCE, "resource")
            } else {
                (EXIT_INVALID, "engine")
            };
            error_outcome(code, kind, &e.to_string(), &[])
        }
    }
}

fn invalid(violations: Vec<Violation>) -> Outcome {
    for v in &violations {
        eprintln!("violation: {v}");
    }
    let resource = violations.iter().any(|v| v.kind == ViolationKind::Resource);
    let (code, kind) = if resource {
        (EXIT_RESOURCE, "resource")
    } else {
        (EXIT_INVALID, "invalid")
    };
    error_outcome(
        code,
        kind,
        &format!("model has {} violation(s)", violations.len()),
        &violations,
    )
}

fn io_error(path: &Path, e: &std::io::Error) -> Outcome {
    eprintln!("error: cannot write {}: {e}", path.display());
    error_outcome(EXIT_INVALID, "io", &format!("{}: {e}", path.display()), &[])
}

fn error_json(kind: &str, message: &str) -> serde_json::Value {
    json!({"error": {"kind": kind, "message": message}})
}

fn error_outcome(code: u8, kind: &str, message: &str, violations: &[Violation]) -> Outcome {
    let mut out = error_json(kind, message);
    if !violations.is_empty() {
        out["error"]["violations"] = json!(violations);
    }
    Outcome {
        code,
        json: Some(serde_json::to_string_pretty(&out).expect("serializable")),
    }
}

fn summary(doc: &ResultDocument) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "genus {}: {} pieces, {} maximal chains, {} blocks",
        doc.genus,
        doc.pieces.len(),
        doc.chains.len(),
        doc.blocks.len()
    );
    for b in &doc.blocks {
        let _ = writeln!(
            s,
            "  {} {} dim {} ({} vertices)",
            b.id,
            b.label,
            b.affine_dim,
            b.polytope.vertices().len()
        );
    }
    for w in &doc.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn report(v: &VerificationReport) -> String {
    let mut s = String::new();
    if let Some(st) = &v.star_shape {
        let _ = match &st.witness {
            None => writeln!(s, "star-shape: true ({} segments)", st.segments_tested),
            Some(w) => writeln!(
                s,
                "star-shape: false, segment to {} leaves the union on ({}, {})",
                w.point, w.gap.start, w.gap.end
            ),
        };
    }
    if let Some(b) = &v.bound {
        let _ = writeln!(
            s,
            "bound: {} blocks <= {}: {}",
            b.count.blocks,
            b.count.bound,
            mark(b.count.passed)
        );
        for var in &b.variants {
            let ids: Vec<&str> = var.support.iter().map(String::as_str).collect();
            let _ = writeln!(
                s,
                "  support {}: {} variant(s): {}",
                ids.join("+"),
                var.variants,
                mark(var.passed)
            );
        }
    }
    if let Some(sub) = &v.subspace {
        let ok = sub.span_failures.is_empty() && sub.containment_failures.is_empty();
        let _ = writeln!(
            s,
            "subspace: {} span failure(s), {} containment failure(s): {}",
            sub.span_failures.len(),
            sub.containment_failures.len(),
            mark(ok)
        );
    }
    if let Some(c) = &v.convexity {
        let convex = c.blocks.iter().filter(|b| b.probe.convex).count();
        let _ = writeln!(
            s,
            "convexity (density {}): {}/{} blocks convex: {}",
            c.density,
            convex,
            c.blocks.len(),
            mark(convex == c.blocks.len())
        );
        let _ = match &c.global.witness {
            None => writeln!(s, "  union of chain sets: no counterexample"),
            Some(w) => writeln!(s, "  union of chain sets: not convex, witness {}", w.point),
        };
    }
    if let Some(i) = &v.interior {
        let verdict = match i.verdict {
            InteriorVerdict::Convex => "convex",
            InteriorVerdict::NotApplicable => "not-applicable",
            InteriorVerdict::Violation => "violation",
        };
        let _ = writeln!(s, "interior: {verdict}");
    }
    if let Some(o) = &v.oracle {
        let _ = writeln!(
            s,
            "oracle: {} samples checked (seed {}), {} failure(s): {}",
            o.checked,
            o.seed,
            o.failures.len(),
            mark(o.failures.is_empty())
        );
    }
    let _ = writeln!(s, "result: {}", if v.passed { "PASS" } else { "FAIL" });
    s
}
