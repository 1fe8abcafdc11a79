//! CSV and JSON writers. Every file starts with the tool version and the
//! effective configuration.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Round-trip float formatting with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new<C: Serialize>(config: &C, header: &[&str]) -> anyhow::Result<Self> {
        let mut buf = format!("# stenzel {VERSION}\n# config {}\n", serde_json::to_string(config)?);
        buf.push_str(&header.join(","));
        buf.push('\n');
        Ok(Csv { buf })
    }

    pub fn row(&mut self, cells: &[String]) {
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

pub fn json_doc<C: Serialize>(config: &C, body: Value) -> anyhow::Result<String> {
    let mut doc = json!({ "version": VERSION, "config": config });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Write to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

pub fn sidecar_path(p: &Path) -> PathBuf {
    p.with_extension("json")
}
