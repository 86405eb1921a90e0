//! Output documents: a header (tool, version, config echo, cutoff, budgets)
//! followed by the result, as pretty JSON or as CSV with `#` header lines.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Emit, RunConfig};
use crate::Failure;

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub struct Report {
    pub command: &'static str,
    pub args: Value,
    pub budgets: Value,
    pub result: Value,
    pub table: Option<Table>,
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize to JSON")
}

/// A 64-bit fixed-point angle as a bit-exact hex float.
pub fn hex64(t: u64) -> String {
    if t == 0 {
        return "0x0p-0".into();
    }
    let z = t.trailing_zeros();
    format!("0x{:x}p-{}", t >> z, 64 - z)
}

/// Shortest round-trip decimal.
pub fn dec(x: f64) -> String {
    format!("{x:?}")
}

impl Report {
    fn header(&self, cfg: &RunConfig) -> Value {
        json!({
            "tool": "skewlab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": to_value(cfg),
            "args": self.args,
            "K": cfg.k,
            "budgets": self.budgets,
        })
    }

    pub fn render(&self, cfg: &RunConfig) -> Result<String, Failure> {
        match cfg.emit {
            Emit::Json => {
                let mut doc = Map::new();
                doc.insert("header".into(), self.header(cfg));
                match &self.result {
                    Value::Object(m) => doc.extend(m.clone()),
                    other => {
                        doc.insert("result".into(), other.clone());
                    }
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON");
                s.push('\n');
                Ok(s)
            }
            Emit::Csv => {
                let table = self
                    .table
                    .as_ref()
                    .ok_or_else(|| Failure::Usage(format!("{} has no CSV form; use --emit json", self.command)))?;
                let header = self.header(cfg);
                let mut s = String::new();
                for key in ["tool", "version", "command", "K", "config", "args", "budgets"] {
                    s.push_str(&format!("# {key}: {}\n", header[key]));
                }
                s.push_str(&table.columns.join(","));
                s.push('\n');
                for r in &table.rows {
                    s.push_str(&r.join(","));
                    s.push('\n');
                }
                Ok(s)
            }
        }
    }
}
