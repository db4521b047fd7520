//! Tabular output: CSV (plot-ready, header row, '.' decimal separator) and
//! JSON (one top-level object `{meta, rows}` carrying full provenance).
//! Files are written to a temporary sibling and atomically renamed so a
//! failed run never leaves a partial file behind.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    U(u64),
    S(String),
    Null,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => format!("{v}"),
            Cell::U(v) => format!("{v}"),
            Cell::S(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) => json!(v),
            Cell::U(v) => json!(v),
            Cell::S(s) => json!(s),
            Cell::Null => Value::Null,
        }
    }
}

#[derive(Debug)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, meta: Map<String, Value>) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert((*name).to_string(), cell.json());
                }
                Value::Object(obj)
            })
            .collect();
        let doc = json!({ "meta": Value::Object(meta), "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
        text.push('\n');
        text
    }
}

/// Shared provenance header for the JSON `meta` object.
pub fn base_meta(command: &str, preset: Option<&str>) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("command".into(), json!(command));
    meta.insert(
        "tool".into(),
        json!({
            "name": "mrc-outage",
            "version": env!("CARGO_PKG_VERSION"),
            "git_hash": env!("BUILD_GIT_HASH"),
        }),
    );
    meta.insert("preset".into(), preset.map_or(Value::Null, |p| json!(p)));
    meta
}

/// Writes to `--out` (temp file + atomic rename) or stdout when no path is
/// given.
pub fn emit(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(content.as_bytes())?;
            tmp.persist(path).map_err(|e| CliError::Io(e.to_string()))?;
            Ok(())
        }
    }
}
