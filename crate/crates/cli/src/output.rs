use std::fmt::Write as _;

use sha2::{Digest, Sha256};

/// Name of the manifest every CSV points back to.
pub const MANIFEST_FILE: &str = "manifest.toml";

/// Hex SHA-256 of the raw scenario text.
pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: &'static str,
    pub meaning: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: &'static str, meaning: impl Into<String>) -> Self {
        Self { name: name.into(), unit, meaning: meaning.into() }
    }
}

/// Numeric table written as CSV with '#' header lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

/// Provenance written at the top of each CSV.
#[derive(Debug, Clone, Copy)]
pub struct Provenance<'a> {
    pub command: &'a str,
    pub config_hash: &'a str,
    pub seed: u64,
}

fn header(out: &mut String, prov: &Provenance<'_>, title: &str, columns: &[Column]) {
    let _ = writeln!(out, "# hfine {} {}", prov.command, title);
    let _ = writeln!(out, "# config_sha256: {}", prov.config_hash);
    let _ = writeln!(out, "# seed: {}", prov.seed);
    let _ = writeln!(out, "# manifest: {MANIFEST_FILE}");
    for c in columns {
        let _ = writeln!(out, "# column {} [{}]: {}", c.name, c.unit, c.meaning);
    }
    let names: Vec<&str> = columns.iter().map(|c| c.name.as_str()).collect();
    let _ = writeln!(out, "{}", names.join(","));
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, prov: &Provenance<'_>, title: &str) -> String {
        let mut out = String::new();
        header(&mut out, prov, title, &self.columns);
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// CSV with free-text cells; used for the validation table.
pub fn render_text_table(prov: &Provenance<'_>, title: &str, columns: &[Column], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    header(&mut out, prov, title, columns);
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.replace([',', '\n'], ";")).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// One file produced by a command, not yet written.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}
