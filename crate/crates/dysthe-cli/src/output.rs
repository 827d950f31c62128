//! Deterministic artifact serialization: JSON and CSV with every float
//! printed at 17 significant digits, so identical runs produce byte-identical
//! bytes regardless of thread count.

use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// 17-significant-digit float, round-trip faithful.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Incremental JSON object with caller-fixed key order.
#[derive(Default)]
pub struct JsonObj {
    parts: Vec<String>,
}

impl JsonObj {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(mut self, key: &str, v: f64) -> Self {
        self.parts.push(format!("\"{key}\":{}", fmt_f(v)));
        self
    }

    pub fn int(mut self, key: &str, v: i64) -> Self {
        self.parts.push(format!("\"{key}\":{v}"));
        self
    }

    pub fn uint(mut self, key: &str, v: u64) -> Self {
        self.parts.push(format!("\"{key}\":{v}"));
        self
    }

    pub fn text(mut self, key: &str, v: &str) -> Self {
        self.parts.push(format!("\"{key}\":\"{v}\""));
        self
    }

    pub fn flag(mut self, key: &str, v: bool) -> Self {
        self.parts.push(format!("\"{key}\":{v}"));
        self
    }

    /// Pre-serialized JSON value (nested object, array, or null).
    pub fn raw(mut self, key: &str, v: &str) -> Self {
        self.parts.push(format!("\"{key}\":{v}"));
        self
    }

    pub fn build(self) -> String {
        format!("{{{}}}", self.parts.join(","))
    }
}

pub fn json_array(items: &[String]) -> String {
    format!("[{}]", items.join(","))
}

/// CSV with a header row; fields are numeric or bare tokens, never quoted.
pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Self {
            lines: vec![header.to_string()],
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    pub fn build(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

/// Relative paths are redirected into `DYSTHE_OUT_DIR` when it is set; that
/// variable is the only environment override the tool honors.
pub fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var("DYSTHE_OUT_DIR") {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

/// Writes to the path when given, otherwise prints to stdout.
pub fn write_artifact(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let target = resolve_out(p);
            fs::write(&target, content).map_err(|e| {
                CliError::Io(format!(
                    "cannot write output file {}: {e}",
                    target.display()
                ))
            })
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Two-column plot data; an empty point list produces a header-only file.
pub fn emit_plotdata(
    path: &Path,
    x_label: &str,
    y_label: &str,
    points: &[(f64, f64)],
) -> Result<(), CliError> {
    let mut csv = Csv::new(&format!("{x_label},{y_label}"));
    for &(x, y) in points {
        csv.row(&[fmt_f(x), fmt_f(y)]);
    }
    let target = resolve_out(path);
    fs::write(&target, csv.build())
        .map_err(|e| CliError::Io(format!("cannot write plot file {}: {e}", target.display())))
}
