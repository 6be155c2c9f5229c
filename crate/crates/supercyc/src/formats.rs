//! JSON and CSV layouts of everything the CLI writes.

use std::fs;
use std::io;
use std::path::Path;

use serde_json::{json, Map, Value};
use supercyc_core::criterion::CriterionRow;
use supercyc_core::orbit::{OrbitTrace, WitnessPlan};
use supercyc_core::rightinv::TriMatrix;
use supercyc_core::{OperatorSeries, WeightKind, WeightSeq};

use crate::config::RunConfig;
use crate::num::{sparse_to_json, ModeScalar};

/// Identifies the run behind a report.
pub fn header(cfg: &RunConfig, command: &str) -> Value {
    json!({
        "command": command,
        "config_hash": cfg.hash(),
        "mode": cfg.mode.label(),
        "seed": cfg.seed,
        "tool": concat!("supercyc ", env!("CARGO_PKG_VERSION")),
    })
}

/// Floats that may be infinite, such as log bounds of zero.
pub fn f64_json(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn weights_json<R: ModeScalar>(w: &WeightSeq<R>) -> Value {
    match w.kind() {
        WeightKind::ConstantOne => json!({ "variant": "constant_one" }),
        WeightKind::Geometric { c, r } => json!({ "variant": "geometric", "c": c.to_json(), "r": r.to_json() }),
    }
}

pub fn operator_json<S: ModeScalar>(op: &OperatorSeries<S>) -> Value {
    json!({
        "lambda": sparse_to_json(op.lambda()),
        "weights": weights_json(op.weights()),
        "tail": op.tail().map(|t| json!({ "ratio": t.ratio.to_json(), "start": t.start })),
    })
}

/// Dense row-major entries.
pub fn matrix_json<S: ModeScalar>(rows: &[Vec<S>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(ModeScalar::to_json).collect()))
            .collect(),
    )
}

pub fn trimatrix_json<S: ModeScalar>(m: &TriMatrix<S>) -> Value {
    json!({ "d": m.dim(), "entries": matrix_json(m.rows()) })
}

pub fn criterion_row_json<R: ModeScalar>(row: &CriterionRow<R>) -> Value {
    json!({
        "k": row.k,
        "n_k": row.n_k,
        "normUk": row.norm_uk.to_json(),
        "normSk": row.norm_sk.to_json(),
        "product": row.product.to_json(),
        "residual": row.residual.to_json(),
        "ln_sk_bound": f64_json(row.ln_sk_bound),
    })
}

fn csv_bytes<I, R>(header: &[&str], records: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for rec in records {
        w.write_record(rec).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

pub fn criterion_csv<R: ModeScalar>(rows: &[CriterionRow<R>]) -> Vec<u8> {
    csv_bytes(
        &["k", "n_k", "normUk", "normSk", "product", "residual"],
        rows.iter().map(|r| {
            [
                r.k.to_string(),
                r.n_k.to_string(),
                r.norm_uk.to_cell(),
                r.norm_sk.to_cell(),
                r.product.to_cell(),
                r.residual.to_cell(),
            ]
        }),
    )
}

pub fn orbit_trace_csv<S: ModeScalar>(trace: &OrbitTrace<S>) -> Vec<u8> {
    csv_bytes(
        &["k", "target_id", "best_scale", "proj_dist"],
        trace.rows.iter().map(|r| {
            [
                r.k.to_string(),
                r.target_id.to_string(),
                r.best_scale.to_cell(),
                r.proj_dist.to_cell(),
            ]
        }),
    )
}

pub fn witness_plan_json<S: ModeScalar>(plan: &WitnessPlan<S>) -> Value {
    json!({
        "eps": plan.eps,
        "weights": weights_json(&plan.weights),
        "consistent": plan.is_consistent(),
        "blocks": plan.blocks.iter().map(|b| json!({
            "target_id": b.target_id,
            "start": b.start,
            "len": b.len,
            "power": b.power,
            "coeff": b.coeff.to_json(),
            "block_norm": b.block_norm.to_json(),
        })).collect::<Vec<_>>(),
    })
}

/// A generic CSV from string cells.
pub fn table_csv(header: &[&str], rows: Vec<Vec<String>>) -> Vec<u8> {
    csv_bytes(header, rows)
}

/// Files produced by one command, written only after the run finishes.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct OutputSet {
    pub files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    /// Pretty JSON with a `header` entry, newline terminated.
    pub fn json(&mut self, name: &str, header: Value, body: Value) {
        let mut map = Map::new();
        map.insert("header".into(), header);
        if let Value::Object(rest) = body {
            map.extend(rest);
        } else {
            map.insert("body".into(), body);
        }
        let mut bytes = serde_json::to_vec_pretty(&Value::Object(map)).expect("json serialises");
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
    }

    pub fn raw(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn extend(&mut self, other: OutputSet) {
        self.files.extend(other.files);
    }

    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            fs::write(dir.join(name), bytes)?;
        }
        Ok(())
    }
}
