//! Report assembly: a JSON document with the configuration echo, and CSV
//! tables whose numbers carry 12 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

pub const TOOL: &str = "cantorfold";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One CSV file: header and rows of already formatted cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Table {
            file: file.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, command: &str, config: &Value) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {TOOL} {VERSION} {command}");
        let _ = writeln!(s, "# config {config}");
        s.push_str(&self.header.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// `x` rounded to 12 significant digits, without an exponent unless the
/// magnitude is outside `[1e-5, 1e15)`.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let mag = rounded.abs();
    if (1e-5..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Output of one command before it is written.
pub struct Output {
    /// Base name of the JSON report.
    pub stem: String,
    pub result: Value,
    pub tables: Vec<Table>,
    /// One-line human summary for stderr.
    pub summary: String,
}

impl Output {
    pub fn new(stem: &str, result: impl Serialize, summary: String) -> Self {
        Output {
            stem: stem.to_string(),
            result: serde_json::to_value(result).expect("report values serialize"),
            tables: Vec::new(),
            summary,
        }
    }

    pub fn with_table(mut self, t: Table) -> Self {
        self.tables.push(t);
        self
    }

    pub fn document(&self, command: &str, config: &Value) -> String {
        let doc = serde_json::json!({
            "tool": TOOL,
            "version": VERSION,
            "command": command,
            "config": config,
            "result": self.result,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes the JSON report and tables into `dir`, returning the paths.
    pub fn write(
        &self,
        dir: &Path,
        command: &str,
        config: &Value,
    ) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let json = dir.join(format!("{}.json", self.stem));
        fs::write(&json, self.document(command, config))?;
        written.push(json);
        for t in &self.tables {
            let p = dir.join(&t.file);
            fs::write(&p, t.render(command, config))?;
            written.push(p);
        }
        Ok(written)
    }
}
