//! `nabla`: compute covariant derivatives from a scene manifest, run the
//! randomized identity suites, and solve linear ODE systems by series.
//!
//! All input and output is JSON; `-` stands for the standard streams.
//! Exit codes are part of the contract: see each subcommand.

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nabla_core::{
    covariant_derivative_k, iterate_covariant_oracle, load_manifest, load_system, run_verify,
    solve_first_order, solve_second_order, Backend, Error, Jet, PqKind, PqTable, Scalar,
    SolveOutcome, Suite, TensorFieldJet, VerifyConfig,
};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "nabla", version, about = "Series engine for k-th and real-order covariant derivatives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the k-th covariant derivative of the manifest's tensor
    /// field and cross-check it against the iterated single-derivative
    /// oracle. Exits 1 on load errors, 2 when the truncation order cannot
    /// support k derivatives, 3 if the oracle check fails.
    Compute {
        /// Scene manifest path, or - for stdin.
        #[arg(long)]
        manifest: String,
        /// Derivative order.
        #[arg(long)]
        k: usize,
        /// Output path, or - for stdout.
        #[arg(long)]
        out: String,
    },
    /// Run a randomized identity suite over seeded scenes. Exits 0 exactly
    /// when no identity failed; wall time goes to stderr so the report
    /// stays byte-deterministic.
    Verify {
        /// One of: pq, covariant, fractional, all.
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        dim_max: usize,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        /// Report path, or - for stdout (the default).
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Solve a first- or second-order linear system by truncated series.
    /// Exits 1 on load errors, 4 when the divergence flag is raised (the
    /// result is still written).
    Solve {
        /// System document path, or - for stdin.
        #[arg(long)]
        system: String,
        /// Truncation depth; defaults to the document's truncation_N.
        #[arg(long)]
        trunc: Option<usize>,
        /// Output path, or - for stdout.
        #[arg(long)]
        out: String,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Compute { manifest, k, out } => cmd_compute(&manifest, k, &out),
        Command::Verify { suite, trials, seed, dim_max, k_max, out } => {
            cmd_verify(suite, trials, seed, dim_max, k_max, &out)
        }
        Command::Solve { system, trunc, out } => cmd_solve(&system, trunc, &out),
    }
}

fn read_input(path: &str) -> io::Result<String> {
    if path == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        fs::read_to_string(path)
    }
}

fn write_output(path: &str, text: &str) -> io::Result<()> {
    if path == "-" {
        io::stdout().write_all(text.as_bytes())
    } else {
        fs::write(path, text)
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

/// Rationals serialize as exact strings, floats as JSON numbers.
fn scalar_value(s: &Scalar) -> Value {
    match s.backend() {
        Backend::Rational => Value::String(s.to_string()),
        Backend::Float64 => json!(s.to_f64()),
    }
}

fn jet_value(jet: &Jet) -> Value {
    Value::Array(jet.coeffs().iter().map(scalar_value).collect())
}

fn field_value(field: &TensorFieldJet) -> Value {
    let count = field.components().len();
    let items = (0..count)
        .map(|flat| {
            let indices: Vec<Value> =
                field.unflatten(flat).iter().map(|&i| json!(i + 1)).collect();
            json!({
                "indices": indices,
                "coefficients": jet_value(&field.components()[flat]),
            })
        })
        .collect();
    Value::Array(items)
}

fn table_value(table: &PqTable) -> Value {
    let levels = (0..=table.k_max())
        .map(|k| {
            let m = table.level(k).expect("level within k_max");
            let rows: Vec<Value> = (0..m.dim())
                .map(|i| {
                    Value::Array((0..m.dim()).map(|j| jet_value(m.get(i, j))).collect())
                })
                .collect();
            json!({ "level": k, "entries": rows })
        })
        .collect();
    Value::Array(levels)
}

/// Exit code for engine failures after a manifest loaded cleanly: order
/// exhaustion gets its own code, everything else counts as a bad input.
fn engine_exit(e: &Error) -> u8 {
    match e {
        Error::OrderExhausted { .. } | Error::LevelUnderflow { .. } => 2,
        _ => 1,
    }
}

fn to_pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

fn cmd_compute(manifest: &str, k: usize, out: &str) -> ExitCode {
    let text = match read_input(manifest) {
        Ok(t) => t,
        Err(e) => return fail(1, format!("cannot read {manifest}: {e}")),
    };
    let scene = match load_manifest(&text) {
        Ok(s) => s,
        Err(e) => return fail(1, e),
    };
    let field = match &scene.field {
        Some(f) => f,
        None => return fail(1, "manifest has no field block to differentiate"),
    };
    if k > scene.order {
        return fail(2, format!(
            "order exhausted: k = {k} exceeds the manifest truncation order {}",
            scene.order
        ));
    }

    let tables = PqTable::build(PqKind::P, &scene, k)
        .and_then(|p| Ok((p, PqTable::build(PqKind::Q, &scene, k)?)));
    let (p_table, q_table) = match tables {
        Ok(t) => t,
        Err(e) => return fail(engine_exit(&e), e),
    };
    let closed = match covariant_derivative_k(field, &p_table, &q_table, k) {
        Ok(d) => d,
        Err(e) => return fail(engine_exit(&e), e),
    };
    let oracle = scene
        .connection
        .level1_along(&scene.curve)
        .and_then(|level1| iterate_covariant_oracle(field, &level1, k));
    let oracle = match oracle {
        Ok(d) => d,
        Err(e) => return fail(engine_exit(&e), e),
    };

    let compared_order = closed.order().min(oracle.order());
    let matches = closed
        .truncate(compared_order)
        .sub(&oracle.truncate(compared_order))
        .map(|diff| diff.is_zero())
        .unwrap_or(false);

    let (p, q) = field.valence();
    let mut doc = Map::new();
    doc.insert("format".into(), json!(1));
    doc.insert("k".into(), json!(k));
    doc.insert("dim".into(), json!(scene.dim()));
    doc.insert("valence".into(), json!([p, q]));
    doc.insert("backend".into(), json!(scene.backend.name()));
    doc.insert("base_point".into(), scalar_value(&scene.base_point));
    doc.insert("derivative_order".into(), json!(closed.order()));
    doc.insert("derivative".into(), field_value(&closed));
    doc.insert("p_table".into(), table_value(&p_table));
    doc.insert("q_table".into(), table_value(&q_table));
    doc.insert("oracle".into(), json!({
        "matches": matches,
        "compared_order": compared_order,
    }));

    if let Err(e) = write_output(out, &to_pretty(&Value::Object(doc))) {
        return fail(1, format!("cannot write {out}: {e}"));
    }
    if matches {
        ExitCode::SUCCESS
    } else {
        fail(3, "closed formula disagrees with the iterated oracle")
    }
}

fn cmd_verify(suite: Suite, trials: u64, seed: u64, dim_max: usize, k_max: usize, out: &str) -> ExitCode {
    let config = VerifyConfig { suite, trials, seed, dim_max, k_max };
    let report = run_verify(&config);
    let mut text = report.to_json();
    text.push('\n');
    if let Err(e) = write_output(out, &text) {
        return fail(1, format!("cannot write {out}: {e}"));
    }
    eprintln!(
        "suite {} finished: {} trials, {} failures, {:.3}s",
        report.suite,
        report.trials,
        report.failures.len(),
        report.elapsed
    );
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn cmd_solve(system: &str, trunc: Option<usize>, out: &str) -> ExitCode {
    let text = match read_input(system) {
        Ok(t) => t,
        Err(e) => return fail(1, format!("cannot read {system}: {e}")),
    };
    let doc = match load_system(&text) {
        Ok(d) => d,
        Err(e) => return fail(1, e),
    };
    let n_trunc = trunc.unwrap_or(doc.truncation_n);
    let outcome = doc.build(n_trunc).and_then(|sys| match doc.order_of_system {
        1 => solve_first_order(&sys, n_trunc),
        _ => solve_second_order(&sys, n_trunc),
    });
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => return fail(1, e),
    };

    if let Err(e) = write_output(out, &to_pretty(&solve_value(&doc.dim, doc.order_of_system, doc.backend, n_trunc, &outcome))) {
        return fail(1, format!("cannot write {out}: {e}"));
    }
    if outcome.solution.diverging {
        fail(4, "series diverges by the ratio test; result written anyway")
    } else {
        ExitCode::SUCCESS
    }
}

fn solve_value(
    dim: &usize,
    order_of_system: u8,
    backend: Backend,
    n_trunc: usize,
    outcome: &SolveOutcome,
) -> Value {
    let solution: Vec<Value> = outcome
        .solution
        .value
        .components()
        .iter()
        .map(|series| {
            let terms: Vec<Value> = series
                .terms()
                .iter()
                .map(|(c, e)| json!({ "coeff": scalar_value(c), "exponent": scalar_value(e) }))
                .collect();
            Value::Array(terms)
        })
        .collect();
    let samples: Vec<Value> = outcome
        .samples
        .iter()
        .map(|(s, row)| json!({ "s": s, "values": row }))
        .collect();

    let mut doc = Map::new();
    doc.insert("format".into(), json!(1));
    doc.insert("dim".into(), json!(dim));
    doc.insert("order_of_system".into(), json!(order_of_system));
    doc.insert("backend".into(), json!(backend.name()));
    doc.insert("truncation_n".into(), json!(n_trunc));
    doc.insert("diverging".into(), json!(outcome.solution.diverging));
    doc.insert("tail_report".into(), json!(outcome.solution.tail_report));
    doc.insert("solution".into(), Value::Array(solution));
    doc.insert("samples".into(), Value::Array(samples));
    doc.insert("residual_norms".into(), json!(outcome.residual_norms));
    Value::Object(doc)
}
