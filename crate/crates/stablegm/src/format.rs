//! File formats.
//!
//! * Data: CSV, first row variable names, then one real-valued sample per
//!   row. Lines starting with `#` are comments.
//! * Model: JSON `{alpha, nodes: [{name, parents, weights, beta, gamma, mu}]}`
//!   with an optional `provenance` object that readers ignore.
//! * Topology: one `parent,child` pair per line.
//! * Group labels: one label per line, one line per data row.
//!
//! Tabular outputs start with a `#` header naming the tool version, the verb
//! and every resolved setting. Floats are written in Rust's shortest
//! round-trip form, so re-reading an output reproduces the values exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use stablegm_core::{Dag, DataMatrix, NoiseLaw, SGModel};

use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn read_file(path: &Path) -> Result<String> {
    let mut text = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(text)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Shortest round-trip rendering (`1.0`, `0.25`, `1e-7`).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Resolved configuration echoed at the top of every output.
#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub verb: String,
    pub settings: Vec<(String, String)>,
}

impl Header {
    pub fn new(verb: &str, settings: Vec<(String, String)>) -> Self {
        Header { verb: verb.to_string(), settings }
    }

    /// Flattens a serializable settings struct into sorted `key = value` pairs.
    pub fn from_settings<T: Serialize>(verb: &str, settings: &T) -> Self {
        let value = serde_json::to_value(settings).expect("settings serialize");
        let pairs = match value {
            Value::Object(map) => map
                .into_iter()
                .filter(|(_, v)| !v.is_null())
                .map(|(k, v)| {
                    let text = match v {
                        Value::String(s) => s,
                        other => other.to_string(),
                    };
                    (k, text)
                })
                .collect(),
            _ => Vec::new(),
        };
        Header::new(verb, pairs)
    }

    pub fn render(&self) -> String {
        let mut out = format!("# stablegm {VERSION} {}\n", self.verb);
        for (k, v) in &self.settings {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let settings: serde_json::Map<String, Value> =
            self.settings.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        serde_json::json!({ "tool": "stablegm", "version": VERSION, "command": self.verb, "settings": settings })
    }
}

fn csv_error(source_name: &str, err: &csv::Error) -> Error {
    let line = err.position().map(|p| p.line() as usize).unwrap_or(0);
    let message = match err.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("expected {expected_len} fields, found {len}")
        }
        csv::ErrorKind::Utf8 { .. } => "invalid UTF-8".to_string(),
        _ => err.to_string(),
    };
    Error::parse(source_name, line, message)
}

pub fn parse_data(text: &str, source_name: &str) -> Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(text.as_bytes());
    let names: Vec<String> =
        reader.headers().map_err(|e| csv_error(source_name, &e))?.iter().map(str::to_string).collect();
    let header_line =
        text.lines().position(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty()).map(|i| i + 1).unwrap_or(1);
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(Error::parse(source_name, header_line, "missing header row"));
    }
    if let Some(i) = names.iter().position(String::is_empty) {
        return Err(Error::parse(source_name, header_line, format!("column {} has an empty name", i + 1)));
    }
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(Error::parse(source_name, header_line, format!("duplicate variable `{name}`")));
        }
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(source_name, &e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        for (j, field) in record.iter().enumerate() {
            if field.is_empty() {
                return Err(Error::parse(source_name, line, format!("missing value for `{}`", names[j])));
            }
            let v: f64 =
                field.parse().map_err(|_| Error::parse(source_name, line, format!("`{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(Error::parse(source_name, line, format!("non-finite value `{field}`")));
            }
            columns[j].push(v);
        }
    }
    Ok(DataMatrix::new(names, columns)?)
}

pub fn read_data(path: &Path) -> Result<DataMatrix> {
    parse_data(&read_file(path)?, &path.display().to_string())
}

pub fn render_data(data: &DataMatrix, header: &Header) -> String {
    let mut out = header.render();
    out.push_str(&csv_row(data.names().iter().map(String::as_str)));
    for i in 0..data.n_rows() {
        let row: Vec<String> = data.columns().iter().map(|c| fmt_f64(c[i])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn csv_row<'a>(fields: impl Iterator<Item = &'a str>) -> String {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer.write_record(fields).expect("in-memory write");
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Value>,
    alpha: f64,
    nodes: Vec<NodeFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeFile {
    name: String,
    #[serde(default)]
    parents: Vec<String>,
    #[serde(default)]
    weights: Vec<f64>,
    #[serde(default)]
    beta: f64,
    gamma: f64,
    #[serde(default)]
    mu: f64,
}

pub fn parse_model(text: &str, source_name: &str) -> Result<SGModel> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::parse(source_name, e.line(), e.to_string()))?;
    let names: Vec<String> = file.nodes.iter().map(|n| n.name.clone()).collect();
    let mut parents = Vec::with_capacity(names.len());
    for node in &file.nodes {
        if node.parents.len() != node.weights.len() {
            return Err(Error::Model(stablegm_core::Error::InvalidGraph(format!(
                "node `{}` lists {} parents and {} weights",
                node.name,
                node.parents.len(),
                node.weights.len()
            ))));
        }
        let idx = node
            .parents
            .iter()
            .map(|p| {
                names.iter().position(|n| n == p).ok_or_else(|| {
                    stablegm_core::Error::InvalidGraph(format!("node `{}` has unknown parent `{p}`", node.name))
                })
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        parents.push(idx);
    }
    let dag = Dag::new(names, parents)?;
    let weights = file.nodes.iter().map(|n| n.weights.clone()).collect();
    let noise = file.nodes.iter().map(|n| NoiseLaw { beta: n.beta, gamma: n.gamma, mu: n.mu }).collect();
    Ok(SGModel::new(dag, file.alpha, weights, noise)?)
}

pub fn read_model(path: &Path) -> Result<SGModel> {
    parse_model(&read_file(path)?, &path.display().to_string())
}

pub fn render_model(model: &SGModel, provenance: Option<Value>) -> String {
    let names = model.names();
    let nodes = (0..model.n_nodes())
        .map(|j| NodeFile {
            name: names[j].clone(),
            parents: model.dag.parents(j).iter().map(|&p| names[p].clone()).collect(),
            weights: model.weights[j].clone(),
            beta: model.noise[j].beta,
            gamma: model.noise[j].gamma,
            mu: model.noise[j].mu,
        })
        .collect();
    let file = ModelFile { provenance, alpha: model.alpha, nodes };
    let mut out = serde_json::to_string_pretty(&file).expect("model serializes");
    out.push('\n');
    out
}

/// Content lines with their 1-based line numbers; blank and `#` lines skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Edge list to a graph; nodes are numbered in order of first appearance.
pub fn parse_topology(text: &str, source_name: &str) -> Result<Dag> {
    let mut names: Vec<String> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let intern = |name: &str, names: &mut Vec<String>| match names.iter().position(|n| n == name) {
        Some(i) => i,
        None => {
            names.push(name.to_string());
            names.len() - 1
        }
    };
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::parse(source_name, line, format!("expected `parent,child`, found `{content}`")));
        }
        let p = intern(fields[0], &mut names);
        let c = intern(fields[1], &mut names);
        if p == c {
            return Err(Error::parse(source_name, line, format!("self-loop on `{}`", fields[0])));
        }
        if edges.contains(&(p, c)) {
            return Err(Error::parse(source_name, line, format!("duplicate edge `{content}`")));
        }
        edges.push((p, c));
    }
    if names.is_empty() {
        return Err(Error::parse(source_name, 1, "no edges"));
    }
    Ok(Dag::from_edges(names, &edges)?)
}

pub fn read_topology(path: &Path) -> Result<Dag> {
    parse_topology(&read_file(path)?, &path.display().to_string())
}

pub fn parse_labels(text: &str) -> Vec<String> {
    content_lines(text).map(|(_, l)| l.to_string()).collect()
}

pub fn read_labels(path: &Path) -> Result<Vec<String>> {
    Ok(parse_labels(&read_file(path)?))
}

/// Tab-separated table: header comment block, column names, rows.
pub fn render_table(header: &Header, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.render();
    out.push_str(&columns.join("\t"));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

/// Comment lines appended after a table.
pub fn render_notes(notes: &BTreeMap<String, String>) -> String {
    notes.iter().map(|(k, v)| format!("# {k} = {v}\n")).collect()
}
