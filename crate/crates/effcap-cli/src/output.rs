//! Table model and emitters.
//!
//! Every machine-readable result is a `Table`: provenance metadata plus
//! uniform rows (one per swept value and method). The CSV form prints
//! metadata as `#`-prefixed lines followed by a fixed header row:
//!
//! ```text
//! # effcap 0.1.0
//! # kappa = 1
//! ...
//! snr_db,method,capacity,error_estimate,route,wall_ms,error
//! 10,exact,2.7517817861035161e0,9.0e-12,contour,41.3,
//! ```
//!
//! `capacity` is printed with 17 significant digits so the binary value
//! round-trips; `wall_ms` is the only column that varies between reruns
//! with identical flags, so golden comparisons drop it by name. The JSON
//! form carries the same metadata and rows as one object.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::args::{CliError, Format};

pub struct Table {
    /// Provenance lines in emission order: version, parameters, methods,
    /// tolerances, seeds. Never timestamps.
    pub meta: Vec<(String, Value)>,
    /// Names of the leading key columns (axis and curve identifiers).
    pub key_cols: Vec<&'static str>,
    pub rows: Vec<Row>,
}

pub struct Row {
    /// One value per entry of `key_cols`.
    pub keys: Vec<f64>,
    /// Resolved method on success, requested method on failure.
    pub method: &'static str,
    pub capacity: Option<f64>,
    pub error_estimate: Option<f64>,
    pub route: String,
    pub wall_ms: f64,
    pub error: Option<String>,
}

/// Format a key value the way the flag accepted it (shortest round-trip).
fn key_str(v: f64) -> String {
    format!("{v}")
}

/// Quote a CSV field if it contains a delimiter, quote, or newline.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.meta {
            let text = match value {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("# {key} = {text}\n"));
        }
        let mut header: Vec<String> = self.key_cols.iter().map(|c| c.to_string()).collect();
        header.extend(
            ["method", "capacity", "error_estimate", "route", "wall_ms", "error"]
                .iter()
                .map(|c| c.to_string()),
        );
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut fields: Vec<String> = row.keys.iter().map(|&k| key_str(k)).collect();
            fields.push(row.method.to_string());
            fields.push(row.capacity.map_or(String::new(), |v| format!("{v:.16e}")));
            fields.push(
                row.error_estimate
                    .map_or(String::new(), |v| format!("{v:.3e}")),
            );
            fields.push(csv_field(&row.route));
            fields.push(format!("{:.3}", row.wall_ms));
            fields.push(csv_field(row.error.as_deref().unwrap_or("")));
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let meta: serde_json::Map<String, Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (col, &k) in self.key_cols.iter().zip(&row.keys) {
                    obj.insert(col.to_string(), json!(k));
                }
                obj.insert("method".into(), json!(row.method));
                obj.insert("capacity".into(), json!(row.capacity));
                obj.insert("error_estimate".into(), json!(row.error_estimate));
                obj.insert("route".into(), json!(row.route));
                obj.insert("wall_ms".into(), json!(row.wall_ms));
                obj.insert("error".into(), json!(row.error));
                Value::Object(obj)
            })
            .collect();
        let doc = json!({ "meta": meta, "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("tables serialize");
        text.push('\n');
        text
    }
}

/// Write to the given path, or to standard output when absent. File and
/// stream failures are I/O errors (exit 5).
pub fn write_out(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::new(5, format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::new(5, format!("cannot write to standard output: {e}")))
        }
    }
}

// ---------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> Table {
        Table {
            meta: vec![
                ("effcap".into(), json!("0.1.0")),
                ("kappa".into(), json!(1.0)),
            ],
            key_cols: vec!["snr_db"],
            rows: vec![
                Row {
                    keys: vec![10.0],
                    method: "exact",
                    capacity: Some(2.75),
                    error_estimate: Some(1e-9),
                    route: "contour".into(),
                    wall_ms: 12.0,
                    error: None,
                },
                Row {
                    keys: vec![20.0],
                    method: "exact",
                    capacity: None,
                    error_estimate: None,
                    route: String::new(),
                    wall_ms: 0.5,
                    error: Some("poles collide, separation 0".into()),
                },
            ],
        }
    }

    #[test]
    fn csv_has_metadata_header_and_error_column() {
        let csv = sample_table().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# effcap = 0.1.0", "version metadata first");
        assert_eq!(lines[1], "# kappa = 1.0", "parameter metadata");
        assert_eq!(
            lines[2], "snr_db,method,capacity,error_estimate,route,wall_ms,error",
            "fixed header row"
        );
        assert!(
            lines[3].starts_with("10,exact,2.75"),
            "data row leads with the axis value: {}",
            lines[3]
        );
        assert!(
            lines[4].contains("\"poles collide, separation 0\""),
            "error with a comma is quoted: {}",
            lines[4]
        );
    }

    #[test]
    fn json_round_trips_rows_and_meta() {
        let text = sample_table().to_json();
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["meta"]["kappa"], json!(1.0), "meta key survives");
        assert_eq!(doc["rows"][0]["snr_db"], json!(10.0), "axis column named");
        assert_eq!(doc["rows"][1]["capacity"], Value::Null, "failed row is null");
        assert!(
            doc["rows"][1]["error"].as_str().unwrap().contains("poles"),
            "error message carried"
        );
    }
}
