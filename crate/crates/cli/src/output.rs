//! CSV and JSON rendering. Both carry the tool version and the config hash.

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;

pub const TOOL: &str = "posdef";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Usage(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self { headers: headers.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// What a command produced: a table for CSV, a JSON value, the exit code
/// and a few lines for stderr.
pub struct Report {
    pub table: Table,
    pub json: Value,
    pub exit: i32,
    pub summary: Vec<String>,
}

/// Shortest round-trip decimal, switching to exponent form outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if !x.is_finite() || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("serializable value")
}

pub fn render(report: &Report, config: &RunConfig, format: Format) -> Result<Vec<u8>, CliError> {
    let hash = config.hash();
    match format {
        Format::Csv => {
            let mut out = format!("# {TOOL} {VERSION} config-sha256={hash}\n").into_bytes();
            let mut w = csv::Writer::from_writer(&mut out);
            let fail = |e: csv::Error| CliError::Usage(format!("cannot write CSV: {e}"));
            w.write_record(&report.table.headers).map_err(fail)?;
            for row in &report.table.rows {
                w.write_record(row).map_err(fail)?;
            }
            w.flush().map_err(|e| CliError::io("<csv>", e))?;
            drop(w);
            Ok(out)
        }
        Format::Json => {
            let doc = json!({
                "tool": TOOL,
                "version": VERSION,
                "config_sha256": hash,
                "config": config,
                "result": report.json,
            });
            let mut out = serde_json::to_vec_pretty(&doc).expect("serializable document");
            out.push(b'\n');
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1e-7), "1e-7");
        assert_eq!(num(-2.5e20), "-2.5e20");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(f64::NAN), "NaN");
    }

    #[test]
    fn csv_quoting_and_header() {
        let mut table = Table::new(&["a", "b"]);
        table.push(vec!["x,y".into(), "plain".into()]);
        let report = Report { table, json: Value::Null, exit: 0, summary: vec![] };
        let cfg = RunConfig { command: vec!["t".into()], params: Default::default() };
        let text = String::from_utf8(render(&report, &cfg, Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# posdef ") && lines[0].contains(&cfg.hash()));
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines[2], "\"x,y\",plain");
    }
}
