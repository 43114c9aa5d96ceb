//! Tables, their CSV and JSON forms, and the run manifest.
//!
//! Numbers are written with Rust's shortest round-trip formatting in both
//! formats, so CSV and JSON carry bit-identical values.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub meta: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            meta: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let meta: serde_json::Map<String, serde_json::Value> =
            self.meta.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
        let doc = serde_json::json!({
            "meta": meta,
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("finite table values serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
    pub rows: usize,
}

/// Everything needed to rerun a command and check its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Effective arguments after merging any config file; replayable as is.
    pub arguments: Vec<String>,
    pub parameters: serde_json::Value,
    pub tool_version: String,
    pub tolerances: serde_json::Value,
    pub threads: usize,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn file_name(command: &str) -> String {
        format!("{command}.manifest.json")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects the tables of one run and writes them, plus a manifest, to a directory.
pub struct OutputDir {
    dir: PathBuf,
    format: Format,
    written: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(dir: &Path, format: Format) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, stem: &str, table: &Table) -> Result<()> {
        let name = format!("{stem}.{}", self.format.extension());
        let body = table.render(self.format);
        let path = self.dir.join(&name);
        let mut f = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        f.write_all(body.as_bytes())?;
        self.written.push(OutputFile {
            file: name,
            sha256: sha256_hex(body.as_bytes()),
            rows: table.rows.len(),
        });
        Ok(())
    }

    pub fn finish(self, mut manifest: RunManifest) -> Result<PathBuf> {
        manifest.outputs = self.written;
        let path = self.dir.join(RunManifest::file_name(&manifest.command));
        let text = serde_json::to_string_pretty(&manifest)?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec!["t", "value"]).meta("nu", 0.5);
        t.push(vec![0.0, 1.0]);
        t.push(vec![1e-7, 0.1 + 0.2]);
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().render(Format::Csv);
        assert_eq!(csv, "# nu = 0.5\nt,value\n0.0,1.0\n1e-7,0.30000000000000004\n");
    }

    #[test]
    fn csv_and_json_carry_identical_bits() {
        let t = sample();
        let json: serde_json::Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        let csv = t.render(Format::Csv);
        let csv_rows: Vec<Vec<f64>> = csv
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect();
        for (k, row) in csv_rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let jv = json["rows"][k][j].as_f64().unwrap();
                assert_eq!(v.to_bits(), jv.to_bits());
                assert_eq!(v.to_bits(), t.rows[k][j].to_bits());
            }
        }
    }

    #[test]
    fn digest_is_hex_sha256() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
