//! JSON/CSV rendering and the run manifest.
//!
//! Parts are printed 1-based, vertices 0-based (as in hypergraph files).
//! Exact quantities are printed as strings next to their float value.

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use turanpat_core::construction::PartSizeTree;
use turanpat_core::lagrangian::{Certificate, LagrangianResult};
use turanpat_core::{Hypergraph, Pattern};

use crate::Format;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A CSV table: header plus rows.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub struct Outcome {
    pub json: Value,
    pub table: Table,
    pub format: Format,
    /// A negative decision (exit code 1).
    pub negative: bool,
}

impl Outcome {
    pub fn rendered(&self) -> String {
        match self.format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.table.header).expect("in-memory write");
                for row in &self.table.rows {
                    w.write_record(row).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 fields")
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct Manifest {
    pub subcommand: &'static str,
    pub config: Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub version: &'static str,
    pub wall_time_seconds: f64,
    /// SHA-256 of the bytes written to stdout.
    pub result_sha256: Option<String>,
    pub exit_code: u8,
    pub error: Option<String>,
}

impl Manifest {
    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(path, text)
    }
}

pub fn rational(q: &BigRational) -> Value {
    json!({ "exact": q.to_string(), "value": q.to_f64() })
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub fn pattern(p: &Pattern) -> Value {
    json!({
        "k": p.k(),
        "m": p.m(),
        "recursive": p.recursive().iter().map(|&r| r + 1).collect::<Vec<_>>(),
        "profiles": p.profiles().iter().map(|d| d.mult().to_vec()).collect::<Vec<_>>(),
    })
}

pub fn graph(g: &Hypergraph) -> Value {
    json!({ "n": g.n(), "k": g.k(), "edges": g.edges() })
}

pub fn tree(t: &PartSizeTree) -> Value {
    match t {
        PartSizeTree::Empty { n } => json!({ "empty": n }),
        PartSizeTree::Split { sizes, children } => {
            let kids: serde_json::Map<String, Value> = children
                .iter()
                .map(|(i, c)| ((i + 1).to_string(), tree(c)))
                .collect();
            json!({ "sizes": sizes, "children": kids })
        }
    }
}

/// A branch as a dotted 1-based part sequence, e.g. `1.2.2`.
pub fn branch(b: &[usize]) -> String {
    b.iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(".")
}

pub fn point(x: &[f64]) -> String {
    x.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" ")
}

pub fn lagrangian(r: &LagrangianResult) -> Value {
    // Non-numeric certificates settle the value exactly (it is then 0 or 1).
    let exact = match r.certificate {
        Certificate::Numeric => Value::Null,
        _ => Value::String(format!("{}", r.value.round() as i64)),
    };
    json!({
        "value": r.value,
        "value_exact": exact,
        "maximizer": r.maximizer.as_slice(),
        "maximizers": r.maximizers.iter().map(|x| x.as_slice().to_vec()).collect::<Vec<_>>(),
        "stationarity_residual": r.stationarity_residual,
        "lower_bound": r.lower_bound,
        "upper_bound": r.upper_bound,
        "upper_bound_exact": r.upper_bound_exact.as_ref().map(|q| q.to_string()),
        "upper_n": r.upper_n,
        "starts_used": r.starts_used,
        "converged": r.converged,
        "certificate": r.certificate,
    })
}

pub fn lagrangian_table(r: &LagrangianResult) -> Table {
    let mut t = Table::new(vec![
        "value",
        "lower_bound",
        "upper_bound",
        "upper_bound_exact",
        "upper_n",
        "stationarity_residual",
        "converged",
        "certificate",
        "starts_used",
        "maximizer",
    ]);
    t.push(vec![
        fmt_f64(r.value),
        fmt_f64(r.lower_bound),
        fmt_f64(r.upper_bound),
        r.upper_bound_exact
            .as_ref()
            .map(|q| q.to_string())
            .unwrap_or_default(),
        r.upper_n.map(|n| n.to_string()).unwrap_or_default(),
        fmt_f64(r.stationarity_residual),
        r.converged.to_string(),
        serde_json::to_value(r.certificate)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default(),
        r.starts_used.to_string(),
        point(r.maximizer.as_slice()),
    ]);
    t
}
